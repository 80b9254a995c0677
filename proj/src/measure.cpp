#include "pucci3d/measure.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "pucci3d/error.hpp"
#include "pucci3d/parallel.hpp"
#include "pucci3d/rng.hpp"

namespace pucci3d {

namespace {

using boost::math::quadrature::tanh_sinh;

constexpr double kPi = std::numbers::pi;
constexpr double kInnerTol = 1e-12;
constexpr double kOuterTol = 1e-11;

struct Quad {
    double value = 0.0;
    double error = 0.0;
};

// integrate() is not const-qualified in every Boost release, so each thread
// keeps its own instance.
tanh_sinh<double>& integrator() {
    thread_local tanh_sinh<double> ts(15);
    return ts;
}

template <class F>
Quad integrate(F&& f, double lo, double hi, double tol) {
    Quad q;
    if (!(hi > lo)) return q;
    q.value = integrator().integrate(f, lo, hi, tol, &q.error);
    return q;
}

// Outer integral over [lo, hi] split at the given breakpoints; the inner
// integral's worst error is folded into the outer estimate.
template <class Inner>
Quad nested(Inner&& inner, double lo, double hi, std::vector<double> breaks) {
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    Quad total;
    double inner_err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = std::max(lo, breaks[i]), b = std::min(hi, breaks[i + 1]);
        if (!(b > a)) continue;
        const Quad q = integrate(
            [&](double x) {
                const Quad in = inner(x);
                inner_err = std::max(inner_err, in.error);
                return in.value;
            },
            a, b, kOuterTol);
        total.value += q.value;
        total.error += q.error;
    }
    total.error += inner_err * (hi - lo);
    return total;
}

// Face cap: integral over the face square of sw*asin(A (cos u + B cos v))
// restricted to where the argument stays <= 1. `A` and `B` cover Z (gamma/sw,
// 1) and X/Y (1/sw, 1/gamma) with the roles of u, v as written.
Quad cap_volume(double A, double B, double sw) {
    // Inner variable w = alpha - v, so cos v = sin w. The argument stays <= 1
    // for w <= asin(c) with c = (1/A - cos u)/B; 1 - cos u is formed as
    // 2 sin^2(u/2) so thin slivers near u = 0 keep their width.
    auto width = [&](double u) {
        const double su = std::sin(0.5 * u);
        const double c = ((1.0 / A - 1.0) + 2.0 * su * su) / B;
        return c <= 0.0 ? 0.0 : std::asin(std::min(1.0, c));
    };
    std::vector<double> breaks;
    const double cstar = 1.0 / A - B;  // cos u where the width reaches alpha
    if (cstar > 0.0 && cstar < 1.0) breaks.push_back(std::acos(cstar));
    return nested(
        [&](double u) {
            const double cu = std::cos(u);
            auto f = [&](double w) { return sw * std::asin(std::min(1.0, A * (cu + B * std::sin(w)))); };
            const double W = width(u);
            if (W < 1e-9) {
                // tanh-sinh error estimates are meaningless on slivers this thin
                const double f0 = f(0.0), f1 = f(W);
                return Quad{0.5 * W * (f0 + f1), W * std::abs(f1 - f0)};
            }
            return integrate(f, 0.0, W, kInnerTol);
        },
        0.0, kAlpha, breaks);
}

// Edge bridge in (s1, s2): omega * integral of acos(c1 sin s1 + c2 sin s2)
// over c1 sin s1 + c2 sin s2 <= 1.
Quad bridge_volume(double c1, double c2, double omega) {
    const double s1_max = std::asin(std::min(1.0, 1.0 / c1));
    std::vector<double> breaks;
    if (c2 < 1.0) {
        const double sstar = (1.0 - c2) / c1;
        if (sstar > 0.0 && sstar < 1.0) breaks.push_back(std::asin(sstar));
    }
    Quad q = nested(
        [&](double s1) {
            const double base = c1 * std::sin(s1);
            const double hi = std::asin(std::clamp((1.0 - base) / c2, 0.0, 1.0));
            return integrate(
                [&](double s2) { return std::acos(std::clamp(base + c2 * std::sin(s2), 0.0, 1.0)); }, 0.0, hi,
                kInnerTol);
        },
        0.0, s1_max, breaks);
    q.value *= omega;
    q.error *= omega;
    return q;
}

json patch_json(const std::array<double, 7>& v) {
    json j = json::object();
    for (std::size_t k = 0; k < 7; ++k) j[std::string(to_string(kAllPatches[k]))] = v[k];
    return j;
}

}  // namespace

json VolumeReport::to_json() const {
    json j;
    j["schema"] = kSchemaVersion;
    j["method"] = method;
    j["params"] = params;
    j["V"] = V;
    j["error"] = error;
    j["per_patch"] = patch_json(per_patch);
    j["per_patch_error"] = patch_json(per_patch_error);
    return j;
}

VolumeReport volume_quadrature(const Domain& d, double rel_tol) {
    if (d.shape().a() != 0.0)
        throw ParameterError("quadrature volumes need a = 0; scale by 1 - a^2/pi^2 for sheared domains");
    const double g = d.shape().gamma();
    const double sw = d.sqrt_omega();
    const double omega = d.ellipticity().omega();

    std::array<Quad, 7> q;
    q[0] = {kAlpha * kAlpha * kAlpha, 0.0};
    q[3] = cap_volume(g / sw, 1.0, sw);          // Z over (x, y)
    q[1] = cap_volume(1.0 / sw, 1.0 / g, sw);    // X over (y, z)
    q[2] = q[1];                                 // Y is X with x and y swapped
    q[4] = bridge_volume(sw, sw / g, omega);     // ZX
    q[5] = bridge_volume(g * sw, g * sw, omega); // XY
    q[6] = q[4];                                 // YZ is ZX with x and y swapped

    VolumeReport r;
    r.method = "quadrature";
    r.params = params_json(d.shape(), d.ellipticity());
    r.params["rel_tol"] = rel_tol;
    for (std::size_t k = 0; k < 7; ++k) {
        r.per_patch[k] = 8.0 * q[k].value;
        r.per_patch_error[k] = 8.0 * q[k].error;
        r.V += r.per_patch[k];
        r.error += r.per_patch_error[k];
    }
    if (!(r.error <= rel_tol * r.V))
        throw QuadratureBudget("volume quadrature missed its tolerance", r.V, r.error);
    return r;
}

VolumeReport volume_mc(const Domain& d, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ParameterError("Monte Carlo volume needs at least one sample");
    const Box box = d.physical_box();
    const CounterRng rng(seed, 0x3c);
    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<std::array<std::uint64_t, 7>> hits(chunks, std::array<std::uint64_t, 7>{});
    for_each_chunk(n, kChunk, [&](std::size_t c, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            Vec3 X;
            for (int k = 0; k < 3; ++k)
                X[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * rng.uniform(3 * i + static_cast<std::uint64_t>(k));
            if (const auto loc = d.classify(X)) ++hits[c][static_cast<std::size_t>(loc->patch)];
        }
    });
    std::array<std::uint64_t, 7> total{};
    for (const auto& h : hits)
        for (std::size_t k = 0; k < 7; ++k) total[k] += h[k];

    const double bv = box.volume();
    const double nn = static_cast<double>(n);
    auto est = [&](std::uint64_t h) {
        const double p = static_cast<double>(h) / nn;
        return std::pair{bv * p, bv * std::sqrt(p * (1.0 - p) / nn)};
    };
    VolumeReport r;
    r.method = "monte-carlo";
    r.params = params_json(d.shape(), d.ellipticity());
    r.params["n"] = n;
    r.params["seed"] = seed;
    std::uint64_t all = 0;
    for (std::size_t k = 0; k < 7; ++k) {
        std::tie(r.per_patch[k], r.per_patch_error[k]) = est(total[k]);
        all += total[k];
    }
    std::tie(r.V, r.error) = est(all);
    return r;
}

double volume_derivative(double gamma, const EllipticityParams& ep, double h) {
    if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
    const auto [lo, hi] = admissible_gamma(ep);
    if (gamma - h < lo || gamma + h > hi)
        throw ParameterError("difference stencil leaves the admissible gamma interval");
    auto V = [&](double g) { return volume_quadrature(Domain(ShapeParams::make(g, 0.0, ep), ep)).V; };
    return (V(gamma + h) - V(gamma - h)) / (2.0 * h);
}

double normalized_functional(double V, double a, const EllipticityParams& ep, double scale) {
    if (!(scale > 0.0)) throw ParameterError("scale must be positive");
    if (!(std::abs(a) < kPi)) throw ParameterError("shear parameter must satisfy |a| < pi");
    const double mu = ep.lambda() / (scale * scale);
    const double vol = scale * scale * scale * V;
    return mu * std::cbrt(vol * vol) / std::cbrt(1.0 - a * a / (kPi * kPi));
}

double normalized_functional(const ShapeParams& sp, const EllipticityParams& ep, double scale) {
    const ShapeParams flat = ShapeParams::make(sp.gamma(), 0.0, ep);
    const double V = volume_quadrature(Domain(flat, ep)).V;
    return normalized_functional(V, sp.a(), ep, scale);
}

// ---------------------------------------------------------------------------

json KernelValue::to_json() const {
    return {{"value", number(value)}, {"error", number(error)}, {"diverged", diverged}, {"converged", converged}};
}

json KernelIntegrals::to_json() const {
    return {{"K1", k1.to_json()}, {"K2", k2.to_json()}, {"H_plus", h_plus.to_json()}, {"H_minus", h_minus.to_json()}};
}

namespace {

// integral over [0,1) of acos(t) / sqrt(c^2 - t^2), c >= 1, via t = 1 - v^2
KernelValue k_integral(double c, double tol) {
    KernelValue out;
    c = std::max(c, 1.0);  // gamma at an end of its range can round below 1
    const Quad q = integrate(
        [&](double v) {
            // acos(1 - v^2) = 2 asin(v / sqrt 2); c^2 - t^2 = (c - 1 + v^2)(c + 1 - v^2)
            if (v <= 0.0) return 0.0;
            // v / sqrt(c - 1 + v^2) written to survive v^2 underflow at c = 1
            const double r = c == 1.0 ? 1.0 : 1.0 / std::sqrt((c - 1.0) / (v * v) + 1.0);
            return 4.0 * std::asin(v / std::numbers::sqrt2) * r / std::sqrt(c + 1.0 - v * v);
        },
        0.0, 1.0, tol);
    out.value = q.value;
    out.error = q.error;
    out.converged = q.error <= tol * std::abs(q.value) * 10.0;
    return out;
}

// integral over [0, pi/2) of cos t / sqrt(c - cos^2 t); infinite at c = 1
KernelValue h_integral(double c, double tol) {
    KernelValue out;
    const double gap = c - 1.0;
    if (!(gap > 1e-15 * c)) {
        out.value = std::numeric_limits<double>::infinity();
        out.error = 0.0;
        out.diverged = true;
        out.converged = true;
        return out;
    }
    const Quad q = integrate(
        [&](double t) {
            const double s = std::sin(t);
            return std::cos(t) / std::sqrt(gap + s * s);
        },
        0.0, kPi / 2.0, tol);
    out.value = q.value;
    out.error = q.error;
    out.converged = q.error <= tol * std::abs(q.value) * 10.0;
    return out;
}

}  // namespace

KernelIntegrals kernel_integrals(double gamma, const EllipticityParams& ep, double rel_tol) {
    // admissibility check only
    (void)ShapeParams::make(gamma, 0.0, ep);
    const double omega = ep.omega();
    const double sw = std::sqrt(omega);
    KernelIntegrals k;
    k.k1 = k_integral(gamma * sw, rel_tol);
    k.k2 = k_integral(sw / gamma, rel_tol);
    k.h_plus = h_integral(omega / (gamma * gamma), rel_tol);
    k.h_minus = h_integral(omega * gamma * gamma, rel_tol);
    return k;
}

}  // namespace pucci3d
