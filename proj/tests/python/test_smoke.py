import math

import pytest

import pucci3d


def test_pucci_plus_weights_signs():
    m = [[2.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 0.0]]
    assert pucci3d.pucci_plus(m, omega=4.0) == pytest.approx(4.0 * 2.0 - 1.0)
    assert pucci3d.pucci_minus(m, omega=4.0) == pytest.approx(2.0 - 4.0)


def test_field_value_at_origin():
    e = pucci3d.eigenfield([0.0, 0.0, 0.0], omega=9.0)
    assert e["patch"] == "C"
    assert e["value"] == pytest.approx(3.0)


def test_membership_and_admissibility():
    lo, hi = pucci3d.admissible_gamma(9.0)
    assert lo == pytest.approx(1 / 3) and hi == pytest.approx(3.0)
    assert pucci3d.contains([0.1, 0.2, 0.3], omega=9.0)
    assert not pucci3d.contains([20.0, 0.0, 0.0], omega=9.0)
    with pytest.raises(pucci3d.UsageError):
        pucci3d.contains([0.0, 0.0, 0.0], omega=9.0, gamma=3.5)


def test_residual_suite_passes():
    r = pucci3d.verify("residual", omega=9.0, n=2000)
    assert r["pass"]


def test_separable_residual_value():
    res, closed = pucci3d.separable_residual(math.sqrt(3) * math.pi / 3, 3, 1.0, 2.0)
    assert res == pytest.approx(-5 / 24, abs=1e-12)
    assert closed == pytest.approx(-5 / 24, abs=1e-12)


def test_volume_quadrature_against_frozen_value():
    v = pucci3d.volume_quadrature(9.0)
    assert v["V"] == pytest.approx(119.49479257536849, rel=1e-8)


def test_cube_solve_coarse():
    r = pucci3d.solve(1.0, math.pi / 8, cube=True)
    assert r["mu"] == pytest.approx(3.0, rel=0.05)
