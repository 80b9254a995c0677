"""Python access to the pucci3d toolkit.

Report-producing functions return plain dictionaries decoded from the same
JSON the command-line tool writes.
"""

import json as _json

from ._pucci3d import (
    Error,
    NumericalBudgetError,
    UsageError,
    admissible_gamma,
    block_spectrum,
    classify,
    contains,
    eigenfield,
    eigenvalues,
    normalized_functional,
    pucci_minus,
    pucci_plus,
    separable_residual,
    volume_derivative,
)
from . import _pucci3d as _core

SUITES = ("residual", "c1", "boundary", "shear_bound", "block_identity")


def verify(suite, omega, gamma=1.0, a=0.0, n=10_000, seed=7):
    return _json.loads(_core._verify(suite, omega, gamma, a, n, seed))


def volume_quadrature(omega, gamma=1.0, rel_tol=1e-8):
    return _json.loads(_core._volume_quadrature(omega, gamma, rel_tol))


def volume_mc(omega, gamma=1.0, a=0.0, n=100_000, seed=7):
    return _json.loads(_core._volume_mc(omega, gamma, a, n, seed))


def kernel_integrals(gamma, omega):
    return _json.loads(_core._kernel_integrals(gamma, omega))


def solve(omega, h, cube=False, gamma=1.0, a=0.0, scale=1.0, tol=1e-6, maxit=200):
    return _json.loads(_core._solve(omega, h, cube, gamma, a, scale, tol, maxit))


__all__ = [
    "Error", "NumericalBudgetError", "UsageError", "SUITES",
    "admissible_gamma", "block_spectrum", "classify", "contains", "eigenfield", "eigenvalues",
    "kernel_integrals", "normalized_functional", "pucci_minus", "pucci_plus", "separable_residual",
    "solve", "verify", "volume_derivative", "volume_mc", "volume_quadrature",
]
