#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "pucci3d/eigenfield.hpp"
#include "pucci3d/error.hpp"

using namespace pucci3d;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kPi = std::numbers::pi;
Domain dom(double omega, double g, double a = 0.0) {
    const auto ep = EllipticityParams::from_ratio(omega);
    return Domain(ShapeParams::make(g, a, ep), ep);
}
}  // namespace

TEST_CASE("values at distinguished points") {
    for (double g : {0.5, 1.0, 2.0}) {
        const Eigenfield f(dom(9.0, g));
        const PatchEval e = f.eval({0, 0, 0});
        CHECK(e.value == 2 * g + 1);
        CHECK(e.gradient == Vec3{0, 0, 0});
        CHECK(e.hessian.m11 == -g);
        CHECK(e.hessian.m22 == -g);
        CHECK(e.hessian.m33 == -1.0);
    }
    const Eigenfield one(dom(1.0, 1.0));
    CHECK_THAT(one.eval({kPi / 2, kPi / 2, kPi / 2}).value, WithinAbs(0.0, 1e-15));
    CHECK_THROWS_AS(Eigenfield(dom(9.0, 1.0)).eval({20, 0, 0}), DomainError);
}

TEST_CASE("X-cap closed form") {
    // frozen from a symbolic differentiation of the X-cap formula
    const Eigenfield f(dom(9.0, 1.0));
    const PatchEval e = f.eval({kPi / 2 + 0.2, 0.3, 0.4});
    CHECK(e.location.patch == PatchId::X);
    CHECK_THAT(e.value, WithinAbs(1.6765455983583121255, 1e-14));
    CHECK_THAT(e.gradient[0], WithinAbs(-0.99777860070112231198, 1e-14));
    CHECK_THAT(e.gradient[1], WithinAbs(-0.29552020666133957511, 1e-14));
    CHECK_THAT(e.gradient[2], WithinAbs(-0.38941834230865049167, 1e-14));
    CHECK_THAT(e.hessian.m11, WithinAbs(0.022205764974464330776, 1e-14));
    CHECK_THAT(e.hessian.m22, WithinAbs(-0.95533648912560601964, 1e-14));
    CHECK_THAT(e.hessian.m33, WithinAbs(-0.92106099400288508280, 1e-14));
}

TEST_CASE("reflection flips gradient signs and keeps the Hessian") {
    const Eigenfield f(dom(9.0, 1.25));
    const PatchEval a = f.eval({kPi / 2 + 0.2, 0.3, 0.4});
    const PatchEval b = f.eval({-kPi / 2 - 0.2, 0.3, -0.4});
    CHECK(a.value == b.value);
    CHECK(b.gradient[0] == -a.gradient[0]);
    CHECK(b.gradient[1] == a.gradient[1]);
    CHECK(b.gradient[2] == -a.gradient[2]);
    CHECK(b.hessian.m11 == a.hessian.m11);
}

TEST_CASE("patch inertia table and eigen-equation on samples") {
    const std::array<std::array<int, 3>, 7> table{{{-1, -1, -1},
                                                   {1, -1, -1},
                                                   {-1, 1, -1},
                                                   {-1, -1, 1},
                                                   {1, -1, 1},
                                                   {1, 1, -1},
                                                   {-1, 1, 1}}};
    for (double omega : {4.0, 9.0}) {
        const Domain d = dom(omega, 1.0);
        const Eigenfield f(d);
        const auto set = sample_interior(d, 7000, 3, SampleOptions{true, {kAllPatches.begin(), kAllPatches.end()}, 1e-6});
        for (const auto& s : set.samples) {
            const PatchEval e = f.eval(s.point);
            CHECK(e.inertia == table[static_cast<int>(e.location.patch)]);
            CHECK(e.hessian.m12 == 0.0);
            CHECK(e.value > 0.0);
            const double res = -pucci_plus(e.hessian, d.ellipticity()) - e.value;
            CHECK(std::abs(res) <= 1e-10 * std::max(1.0, e.value));
        }
    }
}

TEST_CASE("finite differences match analytic derivatives") {
    const Domain d = dom(9.0, 0.8);
    const Eigenfield f(d);
    const auto set = sample_interior(d, 1400, 8, SampleOptions{true, {kAllPatches.begin(), kAllPatches.end()}, 1e-3});
    const double h = 1e-6, h2 = 1e-4;
    int checked = 0;
    for (const auto& s : set.samples) {
        const PatchEval e = f.eval(s.point);
        bool clear = true;
        for (int i = 0; i < 3; ++i) {
            // keep stencils off the interfaces and mirror planes
            const double c = std::abs(s.point[i]);
            clear = clear && std::abs(c - kPi / 2) > 1e-3 && c > 1e-3;
        }
        if (!clear) continue;
        for (int i = 0; i < 3; ++i) {
            Vec3 p = s.point, m = s.point;
            p[i] += h;
            m[i] -= h;
            if (!d.contains(p) || !d.contains(m)) continue;
            const PatchEval ep = f.eval(p), em = f.eval(m);
            if (ep.location.patch != e.location.patch || em.location.patch != e.location.patch) continue;
            CHECK_THAT((ep.value - em.value) / (2 * h), WithinAbs(e.gradient[i], 1e-6));
            Vec3 p2 = s.point, m2 = s.point;
            p2[i] += h2;
            m2[i] -= h2;
            if (!d.contains(p2) || !d.contains(m2)) continue;
            const PatchEval ep2 = f.eval(p2), em2 = f.eval(m2);
            if (ep2.location.patch != e.location.patch || em2.location.patch != e.location.patch) continue;
            CHECK_THAT((ep2.value - 2 * e.value + em2.value) / (h2 * h2), WithinAbs(e.hessian(i, i), 1e-4));
            ++checked;
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("sheared evaluation") {
    const Domain flat = dom(9.0, 1.0);
    const Eigenfield f0(flat);
    const Vec3 X{0.7, -0.3, 1.9};
    const PatchEval a = f0.eval(X), b = f0.eval_sheared(X);
    CHECK(a.value == b.value);
    CHECK(a.hessian.m11 == b.hessian.m11);

    const Domain d = dom(9.0, 1.0, 1.0);
    const Eigenfield f(d);
    CHECK(f.eval_sheared(d.to_physical({0, 0, 0})).value == 3.0);

    for (const auto& smp : sample_interior(d, 2000, 5).samples) {
        const PatchEval e = f.eval_sheared(smp.point);
        const PatchEval r = f.eval(d.to_reference(smp.point));
        const auto bs = block_spectrum(r.p, r.q, r.r, d.shape().a());
        // eigenvalues of the upper-left 2x2 block by the quadratic formula
        const double tr = e.hessian.m11 + e.hessian.m22;
        const double df = e.hessian.m11 - e.hessian.m22;
        const double rad = std::sqrt(df * df + 4 * e.hessian.m12 * e.hessian.m12);
        const double sc = std::max(1.0, std::abs(bs.mu_plus) + std::abs(bs.mu_minus));
        CHECK_THAT((tr + rad) / 2, WithinAbs(bs.mu_plus, 1e-12 * sc));
        CHECK_THAT((tr - rad) / 2, WithinAbs(bs.mu_minus, 1e-12 * sc));
        CHECK_THAT(e.hessian.m33, WithinAbs(bs.mu3, 1e-12 * sc));
        CHECK(e.hessian.m13 == 0.0);
        CHECK(e.hessian.m23 == 0.0);
    }
}

TEST_CASE("omega one shear equality") {
    const Domain d = dom(1.0, 1.0, 1.0);
    const Eigenfield f(d);
    const double k2 = d.shape().kappa() * d.shape().kappa();
    for (const auto& smp : sample_interior(d, 3000, 2).samples) {
        const PatchEval e = f.eval_sheared(smp.point);
        CHECK_THAT(-pucci_plus(e.hessian, d.ellipticity()), WithinAbs(k2 * e.value, 1e-10));
    }
}

TEST_CASE("block spectrum") {
    auto b = block_spectrum(2.0, -3.0, 1.0, 0.0);
    CHECK_THAT(b.mu_plus, WithinAbs(2.0, 1e-15));
    CHECK_THAT(b.mu_minus, WithinAbs(-3.0, 1e-15));
    CHECK(b.mu3 == 1.0);
    std::mt19937_64 g(9);
    std::uniform_real_distribution<double> P(-10, 10), A(-0.95 * kPi, 0.95 * kPi);
    for (int t = 0; t < 10000; ++t) {
        const double p = P(g), q = P(g), a = A(g);
        const double k2 = 1.0 / (1.0 - a * a / (kPi * kPi));
        b = block_spectrum(p, q, 0.0, a);
        const double sc = std::max(1.0, k2 * (std::abs(p) + std::abs(q)));
        CHECK_THAT(b.mu_plus + b.mu_minus, WithinAbs(k2 * (p + q), 1e-12 * sc));
        CHECK_THAT(b.mu_plus * b.mu_minus, WithinAbs(k2 * p * q, 1e-12 * sc * sc));
    }
    CHECK_THROWS_AS(block_spectrum(1, 1, 1, 4.0), ParameterError);
}

TEST_CASE("separable candidate residual") {
    const auto ep = EllipticityParams::from_bounds(1.0, 2.0);
    const double x = std::sqrt(3.0) * kPi / 3.0;  // cos(x / sqrt 3) = 1/2
    const SeparableResidual r = separable_candidate_residual(x, 3, ep);
    CHECK_THAT(r.residual, WithinAbs(-5.0 / 24.0, 1e-12));
    CHECK_THAT(r.closed_form, WithinAbs(-5.0 / 24.0, 1e-12));
    CHECK(r.precondition_ok);
    const auto one = EllipticityParams::from_ratio(1.0);
    for (double t : {1.2, 1.5, 2.0, 2.5})
        CHECK_THAT(separable_candidate_residual(t, 3, one).residual, WithinAbs(0.0, 1e-14));
    CHECK_THAT(separable_candidate_residual(std::sqrt(3.0) * kPi / 2.0 - 1e-9, 3, ep).residual, WithinAbs(0.0, 1e-8));
    for (int n : {2, 4, 5}) {
        const double th = 1.3;
        const auto s = separable_candidate_residual(std::sqrt(double(n)) * th, n, ep);
        CHECK_THAT(s.residual, WithinAbs(s.closed_form, 1e-12));
    }
    CHECK_THROWS_AS(separable_candidate_residual(1.0, 1, ep), ParameterError);
}

TEST_CASE("field tweaks") {
    FieldTweaks t;
    CHECK(t.is_identity());
    t.quadratic_x = 1e-3;
    CHECK_FALSE(t.is_identity());
    const Eigenfield f(dom(9.0, 1.0), t);
    CHECK_THAT(f.eval({0.5, 0, 0}).value - Eigenfield(dom(9.0, 1.0)).eval({0.5, 0, 0}).value, WithinAbs(2.5e-4, 1e-15));
}
