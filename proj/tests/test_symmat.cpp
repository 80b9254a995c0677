#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pucci3d/error.hpp"
#include "pucci3d/symmat.hpp"

using namespace pucci3d;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("ellipticity parameters") {
    const auto ep = EllipticityParams::from_ratio(9.0);
    CHECK(ep.lambda() == 1.0);
    CHECK(ep.Lambda() == 9.0);
    CHECK(EllipticityParams::from_bounds(2.0, 5.0).omega() == 2.5);
    CHECK_THROWS_AS(EllipticityParams::from_bounds(2.0, 1.0), ParameterError);
    CHECK_THROWS_AS(EllipticityParams::from_bounds(0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(EllipticityParams::from_ratio(0.5), ParameterError);
}

TEST_CASE("eigenvalues of diagonal and rotated matrices") {
    auto ev = eigenvalues(SymMatrix3::diagonal(3.0, -1.0, 2.0));
    CHECK(ev[0] == -1.0);
    CHECK(ev[1] == 2.0);
    CHECK(ev[2] == 3.0);

    // [[2,1,0],[1,2,0],[0,0,5]] has spectrum {1,3,5}
    ev = eigenvalues(SymMatrix3(2, 2, 5, 1, 0, 0));
    CHECK_THAT(ev[0], WithinAbs(1.0, 1e-14));
    CHECK_THAT(ev[1], WithinAbs(3.0, 1e-14));
    CHECK_THAT(ev[2], WithinAbs(5.0, 1e-14));

    // triple root
    ev = eigenvalues(SymMatrix3::identity() * 4.0);
    for (double v : ev) CHECK_THAT(v, WithinAbs(4.0, 1e-14));
}

TEST_CASE("eigen_decompose reconstructs random matrices") {
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> U(-5, 5);
    for (int t = 0; t < 2000; ++t) {
        const SymMatrix3 m(U(g), U(g), U(g), U(g), U(g), U(g));
        const auto d = eigen_decompose(m);
        const double tr = d.values[0] + d.values[1] + d.values[2];
        CHECK_THAT(tr, WithinAbs(m.trace(), 1e-12 * std::max(1.0, m.max_abs())));
        CHECK_THAT(d.values[0] * d.values[1] * d.values[2],
                   WithinAbs(m.determinant(), 1e-10 * std::max(1.0, std::pow(m.max_abs(), 3))));
        for (int k = 0; k < 3; ++k) {
            const Vec3 Av = m.dense().apply(d.vectors[k]);
            for (int i = 0; i < 3; ++i)
                CHECK_THAT(Av[i], WithinAbs(d.values[k] * d.vectors[k][i], 1e-10 * std::max(1.0, m.max_abs())));
            for (int l = 0; l < 3; ++l) {
                double dot = 0;
                for (int i = 0; i < 3; ++i) dot += d.vectors[k][i] * d.vectors[l][i];
                CHECK_THAT(dot, WithinAbs(k == l ? 1.0 : 0.0, 1e-12));
            }
        }
    }
}

TEST_CASE("pucci operators weight eigenvalue signs") {
    const auto ep = EllipticityParams::from_bounds(1.0, 4.0);
    const auto m = SymMatrix3::diagonal(2.0, -1.0, 0.0);
    CHECK(pucci_plus(m, ep) == 4.0 * 2.0 - 1.0);
    CHECK(pucci_minus(m, ep) == 2.0 - 4.0);
    // tiny eigenvalues below the threshold contribute nothing
    CHECK(pucci_plus(SymMatrix3::diagonal(1e-14, -1e-14, 0.0), ep) == 0.0);
}

TEST_CASE("pucci duality and ellipticity bounds on random matrices") {
    const auto ep = EllipticityParams::from_bounds(0.5, 3.0);
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int t = 0; t < 2000; ++t) {
        const SymMatrix3 m(U(g), U(g), U(g), U(g), U(g), U(g));
        const SymMatrix3 n(U(g), U(g), U(g), U(g), U(g), U(g));
        CHECK_THAT(pucci_minus(m, ep), WithinAbs(-pucci_plus(-m, ep), 1e-12));
        CHECK(pucci_minus(m, ep) <= pucci_plus(m, ep) + 1e-12);
        // subadditivity of the maximal operator
        CHECK(pucci_plus(m + n, ep) <= pucci_plus(m, ep) + pucci_plus(n, ep) + 1e-10);
    }
}

TEST_CASE("omega one reduces to lambda times trace") {
    const auto ep = EllipticityParams::from_ratio(1.0, 2.5);
    const SymMatrix3 m(1.0, -2.0, 0.5, 0.3, -0.7, 0.2);
    CHECK_THAT(pucci_plus(m, ep), WithinRel(2.5 * m.trace(), 1e-13));
    CHECK_THAT(pucci_minus(m, ep), WithinRel(2.5 * m.trace(), 1e-13));
}

TEST_CASE("congruence and inertia") {
    Mat3 A = Mat3::identity();
    A(0, 0) = 2.0;
    const auto c = congruence(A, SymMatrix3::diagonal(4.0, 1.0, 1.0));
    CHECK_THAT(c.m11, WithinAbs(1.0, 1e-15));
    CHECK(inertia(SymMatrix3::diagonal(-1.0, 0.0, 2.0), 1e-12) == std::array<int, 3>{-1, 0, 1});
    CHECK_THROWS_AS(congruence(Mat3{}, SymMatrix3::identity()), SingularMatrix);
}
