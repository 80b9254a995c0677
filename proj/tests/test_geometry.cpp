#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "pucci3d/error.hpp"
#include "pucci3d/geometry.hpp"

using namespace pucci3d;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kPi = std::numbers::pi;
const EllipticityParams ep9 = EllipticityParams::from_ratio(9.0);
const EllipticityParams ep1 = EllipticityParams::from_ratio(1.0);
Domain dom(double g, double a, const EllipticityParams& ep) { return Domain(ShapeParams::make(g, a, ep), ep); }
Vec3 scale(const Vec3& p, double t) { return {p[0] * t, p[1] * t, p[2] * t}; }
}  // namespace

TEST_CASE("shape parameters") {
    const auto sp = ShapeParams::make(1.0, kPi / 2, ep9);
    CHECK_THAT(sp.beta(), WithinAbs(-0.5, 1e-15));
    CHECK_THAT(sp.kappa() * sp.kappa(), WithinAbs(4.0 / 3.0, 1e-14));
    CHECK_THAT(sp.shear().determinant(), WithinAbs(1.0 - 0.25, 1e-14));
    CHECK(ShapeParams::make(1.0, 0.0, ep9).kappa() == 1.0);
    for (double a : {0.3, 1.0, 2.0, 3.0}) {
        const auto s = ShapeParams::make(1.0, a, ep9);
        CHECK_THAT(s.kappa() * s.kappa() * (1.0 - s.beta()) / 2.0, WithinAbs(1.0, 1e-14));
        CHECK_THAT(s.det_shear(), WithinAbs(1.0 - a * a / (kPi * kPi), 1e-14));
    }
    CHECK_THROWS_AS(ShapeParams::make(3.5, 0.0, ep9), ParameterError);
    CHECK_THROWS_AS(ShapeParams::make(0.3, 0.0, ep9), ParameterError);
    CHECK_THROWS_AS(ShapeParams::make(1.0, kPi, ep9), ParameterError);
    CHECK_THROWS_AS(ShapeParams::make(1.1, 0.0, ep1), ParameterError);
    const auto [lo, hi] = admissible_gamma(ep9);
    CHECK_THAT(lo, WithinRel(1.0 / 3.0, 1e-15));
    CHECK_THAT(hi, WithinRel(3.0, 1e-15));
}

TEST_CASE("classification examples") {
    const Domain d = dom(1.0, 0.0, ep9);
    REQUIRE(d.classify({0.1, 0.2, 0.3}));
    CHECK(d.classify({0.1, 0.2, 0.3})->patch == PatchId::C);
    REQUIRE(d.classify({kPi / 2 + 0.01, 0.1, 0.1}));
    CHECK(d.classify({kPi / 2 + 0.01, 0.1, 0.1})->patch == PatchId::X);
    CHECK_FALSE(d.classify({kPi / 2 + 2, kPi / 2 + 2, kPi / 2 + 2}));
    CHECK(d.contains({0, 0, 0}));
    CHECK_FALSE(d.contains({0, 0, 50}));
    const auto loc = d.classify({-0.1, 0.2, -kPi / 2 - 0.05});
    REQUIRE(loc);
    CHECK(loc->patch == PatchId::Z);
    CHECK(loc->octant == std::array<int, 3>{-1, 1, -1});
    CHECK_THROWS_AS(d.classify({std::nan(""), 0, 0}), InvalidInput);
}

TEST_CASE("bridge and double-raised points") {
    const Domain d = dom(1.0, 0.0, ep9);
    auto p = d.classify({kPi / 2 + 0.1, 0.2, kPi / 2 + 0.1});
    REQUIRE(p);
    CHECK(p->patch == PatchId::ZX);
    p = d.classify({kPi / 2 + 0.1, kPi / 2 + 0.1, 0.2});
    REQUIRE(p);
    CHECK(p->patch == PatchId::XY);
    p = d.classify({0.2, kPi / 2 + 0.1, kPi / 2 + 0.1});
    REQUIRE(p);
    CHECK(p->patch == PatchId::YZ);
    // three coordinates past alpha belong to no patch
    CHECK_FALSE(d.classify({kPi / 2 + 0.01, kPi / 2 + 0.01, kPi / 2 + 0.01}));
}

TEST_CASE("octant symmetry of membership") {
    std::mt19937_64 g(3);
    for (double gamma : {0.8, 1.0, 1.25}) {
        const Domain d = dom(gamma, 0.0, ep9);
        const double w = d.half_width();
        std::uniform_real_distribution<double> U(0.0, w);
        for (int t = 0; t < 5000; ++t) {
            const Vec3 p{U(g), U(g), U(g)};
            const bool in = d.contains(p);
            for (int s = 1; s < 8; ++s) {
                const Vec3 q{s & 1 ? -p[0] : p[0], s & 2 ? -p[1] : p[1], s & 4 ? -p[2] : p[2]};
                CHECK(d.contains(q) == in);
            }
        }
    }
}

TEST_CASE("patch interiors are disjoint") {
    const Domain d = dom(1.0, 0.0, ep9);
    std::mt19937_64 g(17);
    std::uniform_real_distribution<double> U(0.0, d.half_width());
    int multi = 0;
    for (int t = 0; t < 100000; ++t) {
        const Vec3 p{U(g), U(g), U(g)};
        int strict = 0;
        for (PatchId id : kAllPatches)
            if (d.membership_margin(id, p) > 1e-9) ++strict;
        if (strict > 1) ++multi;
    }
    CHECK(multi == 0);
}

TEST_CASE("shear maps") {
    const Vec3 e1{1, 0, 0};
    const Vec3 f = shear_forward(e1, 1.0);
    CHECK_THAT(f[0], WithinAbs(std::sqrt(1 - 1 / (kPi * kPi)), 1e-15));
    CHECK_THAT(f[1], WithinAbs(1 / kPi, 1e-15));
    CHECK(f[2] == 0.0);
    CHECK(shear_forward({0.3, -0.2, 0.9}, 0.0) == Vec3{0.3, -0.2, 0.9});
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int t = 0; t < 1000; ++t) {
        const Vec3 p{U(g), U(g), U(g)};
        const double a = U(g);
        const Vec3 q = shear_inverse(shear_forward(p, a), a);
        for (int i = 0; i < 3; ++i) CHECK_THAT(q[i], WithinAbs(p[i], 1e-13));
    }
    const Domain d = dom(1.0, 1.0, ep9);
    const Vec3 X = shear_forward({kPi / 2 + 0.01, 0.1, 0.1}, 1.0);
    REQUIRE(d.classify(X));
    CHECK(d.classify(X)->patch == PatchId::X);
}

TEST_CASE("boundary rays") {
    const Domain d = dom(1.0, 0.0, ep9);
    const auto top = boundary_along(d, {0, 0, 1});
    CHECK_THAT(top.point[2], WithinAbs(kPi / 2 + 3 * std::asin(2.0 / 3.0), 1e-10));

    const Domain c = dom(1.0, 0.0, ep1);
    const auto diag = boundary_along(c, {1, 1, 1});
    for (int i = 0; i < 3; ++i) CHECK_THAT(diag.point[i], WithinAbs(kPi / 2, 1e-10));

    for (const auto& b : boundary_scan(d, 500, 9)) {
        CHECK(d.contains(scale(b.point, 1 - 1e-9)));
        CHECK_FALSE(d.contains(scale(b.point, 1 + 1e-9)));
    }
    CHECK_THROWS_AS(boundary_along(d, {0, 0, 0}), InvalidInput);
}

TEST_CASE("interface traces") {
    const Domain d = dom(1.0, 0.0, ep9);
    const Interface cz = interface_info(InterfaceId::C_Z);
    const Vec3 p = cz.point(d, 0.5, 0.25);
    CHECK(p[2] == kPi / 2);
    CHECK_THAT(p[0], WithinAbs(kPi / 4, 1e-15));
    CHECK(interfaces(d).size() == 12);
    const Vec3 m = interface_info(InterfaceId::MirrorX).point(d, 0.3, 0.7);
    CHECK(m[0] == 0.0);
    CHECK(d.contains(m));

    // ZX bridge x-extent at y=0 on z=alpha matches the X-cap trace
    const Vec3 q = interface_info(InterfaceId::ZX_X).point(d, 1.0, 0.0);
    CHECK_THAT(q[0], WithinAbs(kPi / 2 + 3 * std::asin(1.0 / 3.0), 1e-12));
}

TEST_CASE("interior sampling") {
    const Domain d = dom(1.0, 0.0, ep9);
    CHECK(sample_interior(d, 0, 1).samples.empty());
    const auto a = sample_interior(d, 10000, 42);
    const auto b = sample_interior(d, 10000, 42);
    REQUIRE(a.samples.size() == 10000);
    bool same = true;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        same = same && a.samples[i].point == b.samples[i].point;
        CHECK(d.contains(a.samples[i].point));
    }
    CHECK(same);
    const auto s = sample_interior(d, 7000, 1, SampleOptions{true, {kAllPatches.begin(), kAllPatches.end()}, 0.0});
    std::array<int, 7> per{};
    for (const auto& x : s.samples) ++per[static_cast<int>(x.location.patch)];
    for (int k : per) CHECK(k == 1000);
    CHECK(s.empty_patches.empty());
}

TEST_CASE("bounding boxes enclose the domain") {
    for (double a : {0.0, 1.0, -2.0}) {
        const Domain d = dom(1.25, a, ep9);
        const Box b = d.physical_box();
        for (const auto& p : boundary_scan(d, 300, 3)) {
            const Vec3& X = p.point;
            for (int i = 0; i < 3; ++i) {
                CHECK(X[i] >= b.lo[i]);
                CHECK(X[i] <= b.hi[i]);
            }
        }
    }
}
