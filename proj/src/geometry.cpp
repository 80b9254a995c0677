#include "pucci3d/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "pucci3d/error.hpp"
#include "pucci3d/parallel.hpp"
#include "pucci3d/rng.hpp"

namespace pucci3d {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBisectWidth = 1e-12;

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Vec3 scaled(const Vec3& v, double t) { return {v[0] * t, v[1] * t, v[2] * t}; }

void require_finite(const Vec3& p) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2]))
        throw InvalidInput("point has non-finite coordinates");
}

// Height above alpha of a face cap with inverse-sine argument t; negative
// slack when t leaves [0, 1].
double cap_slack(double t, double sw, double coord) {
    if (t > 1.0) return 1.0 - t;
    if (t < 0.0) return t;
    return kAlpha + sw * std::asin(t) - coord;
}

// Edge bridge over the two raised axes (ca, cb) with coefficients c1, c2 and
// free coordinate `free`: 0 <= c1 sin(sa) + c2 sin(sb) <= 1, free <= acos(.).
double bridge_slack(double ca, double cb, double free, double c1, double c2, double sw) {
    const double sa = (ca - kAlpha) / sw;
    const double sb = (cb - kAlpha) / sw;
    const double sa_max = std::asin(std::min(1.0, 1.0 / c1));
    const double sb_max = std::asin(std::min(1.0, 1.0 / c2));
    const double base = std::min({ca - kAlpha, cb - kAlpha, (sa_max - sa) * sw, (sb_max - sb) * sw});
    if (base < 0.0) return base;
    const double t = c1 * std::sin(sa) + c2 * std::sin(sb);
    if (t > 1.0) return std::min(base, 1.0 - t);
    return std::min(base, std::acos(std::max(t, 0.0)) - free);
}

template <class Inside>
BoundaryPoint ray_exit(Inside&& inside, Vec3 dir, double step, double tmax) {
    const double len = norm(dir);
    if (!(len > 0.0) || !std::isfinite(len)) throw InvalidInput("ray direction must be nonzero");
    dir = scaled(dir, 1.0 / len);
    if (!inside(Vec3{0.0, 0.0, 0.0})) throw InternalError("domain does not contain the origin");

    const auto steps = static_cast<long>(std::ceil(tmax / step)) + 1;
    for (long k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) * step;
        if (inside(scaled(dir, t))) continue;
        double lo = static_cast<double>(k - 1) * step;
        double hi = t;
        while (hi - lo > kBisectWidth) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (inside(scaled(dir, mid)) ? lo : hi) = mid;
        }
        return {scaled(dir, lo), dir, lo};
    }
    throw InternalError("ray never left the bounding box");
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(PatchId p) {
    switch (p) {
        case PatchId::C: return "C";
        case PatchId::X: return "X";
        case PatchId::Y: return "Y";
        case PatchId::Z: return "Z";
        case PatchId::ZX: return "ZX";
        case PatchId::XY: return "XY";
        case PatchId::YZ: return "YZ";
    }
    return "?";
}

std::optional<PatchId> patch_from_string(std::string_view s) {
    for (PatchId p : kAllPatches)
        if (to_string(p) == s) return p;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// ShapeParams

std::array<double, 2> admissible_gamma(const EllipticityParams& ep) {
    const double sw = std::sqrt(ep.omega());
    return {1.0 / sw, sw};
}

ShapeParams ShapeParams::make(double gamma, double a, const EllipticityParams& ep) {
    if (!std::isfinite(gamma) || !std::isfinite(a)) throw ParameterError("gamma and a must be finite");
    const auto [lo, hi] = admissible_gamma(ep);
    const double slack = 1e-14 * hi;
    if (gamma < lo - slack || gamma > hi + slack)
        throw ParameterError("gamma=" + std::to_string(gamma) + " outside [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
    if (!(std::abs(a) < kPi)) throw ParameterError("shear parameter must satisfy |a| < pi");
    const double r = a / kPi;
    return ShapeParams(gamma, a, std::sqrt(1.0 - r * r));
}

double ShapeParams::beta() const { return 2.0 * a_ * a_ / (kPi * kPi) - 1.0; }

Mat3 ShapeParams::shear() const {
    Mat3 m;
    m(0, 0) = s_;
    m(1, 0) = a_ / kPi;
    m(1, 1) = 1.0;
    m(2, 2) = s_;
    return m;
}

Mat3 ShapeParams::shear_inverse() const {
    Mat3 m;
    m(0, 0) = 1.0 / s_;
    m(1, 0) = -a_ / (kPi * s_);
    m(1, 1) = 1.0;
    m(2, 2) = 1.0 / s_;
    return m;
}

Vec3 shear_forward(const Vec3& p, double a) {
    if (!(std::abs(a) < kPi)) throw ParameterError("shear parameter must satisfy |a| < pi");
    const double r = a / kPi;
    const double s = std::sqrt(1.0 - r * r);
    return {s * p[0], r * p[0] + p[1], s * p[2]};
}

Vec3 shear_inverse(const Vec3& X, double a) {
    if (!(std::abs(a) < kPi)) throw ParameterError("shear parameter must satisfy |a| < pi");
    const double r = a / kPi;
    const double s = std::sqrt(1.0 - r * r);
    const double x = X[0] / s;
    return {x, X[1] - r * x, X[2] / s};
}

// ---------------------------------------------------------------------------
// Domain

Domain::Domain(const ShapeParams& shape, const EllipticityParams& ep)
    : shape_(ShapeParams::make(shape.gamma(), shape.a(), ep)),
      ep_(ep),
      sw_(std::sqrt(ep.omega())),
      shear_(shape.shear()),
      shear_inv_(shape.shear_inverse()) {}

double Domain::membership_margin(PatchId patch, const Vec3& q) const {
    const double x = q[0], y = q[1], z = q[2];
    const double g = shape_.gamma();
    switch (patch) {
        case PatchId::C:
            return std::min({kAlpha - x, kAlpha - y, kAlpha - z});
        case PatchId::Z: {
            const double base = std::min({kAlpha - x, kAlpha - y, z - kAlpha});
            return std::min(base, cap_slack(g * (std::cos(x) + std::cos(y)) / sw_, sw_, z));
        }
        case PatchId::X: {
            const double base = std::min({kAlpha - y, kAlpha - z, x - kAlpha});
            return std::min(base, cap_slack((g * std::cos(y) + std::cos(z)) / (g * sw_), sw_, x));
        }
        case PatchId::Y: {
            const double base = std::min({kAlpha - x, kAlpha - z, y - kAlpha});
            return std::min(base, cap_slack((g * std::cos(x) + std::cos(z)) / (g * sw_), sw_, y));
        }
        case PatchId::ZX:
            return bridge_slack(x, z, y, sw_, sw_ / g, sw_);
        case PatchId::XY:
            return bridge_slack(x, y, z, g * sw_, g * sw_, sw_);
        case PatchId::YZ:
            return bridge_slack(y, z, x, sw_, sw_ / g, sw_);
    }
    return -1.0;
}

std::optional<Location> Domain::classify_reference(const Vec3& p) const {
    require_finite(p);
    const Vec3 q{std::abs(p[0]), std::abs(p[1]), std::abs(p[2])};
    const Location base{PatchId::C, {p[0] < 0 ? -1 : 1, p[1] < 0 ? -1 : 1, p[2] < 0 ? -1 : 1}};

    // Which coordinates are raised past alpha determines the only candidate;
    // on alpha itself the lower (canonical) patch is tried.
    const bool rx = q[0] > kAlpha, ry = q[1] > kAlpha, rz = q[2] > kAlpha;
    PatchId candidate;
    switch ((rx ? 1 : 0) | (ry ? 2 : 0) | (rz ? 4 : 0)) {
        case 0: candidate = PatchId::C; break;
        case 1: candidate = PatchId::X; break;
        case 2: candidate = PatchId::Y; break;
        case 4: candidate = PatchId::Z; break;
        case 5: candidate = PatchId::ZX; break;
        case 3: candidate = PatchId::XY; break;
        case 6: candidate = PatchId::YZ; break;
        default: return std::nullopt;
    }
    if (!in_patch(candidate, q)) return std::nullopt;
    Location loc = base;
    loc.patch = candidate;
    return loc;
}

Vec3 Domain::to_reference(const Vec3& X) const { return shear_inv_.apply(X); }
Vec3 Domain::to_physical(const Vec3& p) const { return shear_.apply(p); }

std::optional<Location> Domain::classify(const Vec3& X) const {
    if (shape_.a() == 0.0) return classify_reference(X);
    require_finite(X);
    return classify_reference(to_reference(X));
}

Box Domain::patch_box(PatchId patch) const {
    const double g = shape_.gamma();
    auto height = [&](double t) { return kAlpha + sw_ * std::asin(std::min(1.0, t)); };
    switch (patch) {
        case PatchId::C: return {{0, 0, 0}, {kAlpha, kAlpha, kAlpha}};
        case PatchId::Z: return {{0, 0, kAlpha}, {kAlpha, kAlpha, height(2.0 * g / sw_)}};
        case PatchId::X: return {{kAlpha, 0, 0}, {height((g + 1.0) / (g * sw_)), kAlpha, kAlpha}};
        case PatchId::Y: return {{0, kAlpha, 0}, {kAlpha, height((g + 1.0) / (g * sw_)), kAlpha}};
        case PatchId::ZX:
            return {{kAlpha, 0, kAlpha}, {height(1.0 / sw_), kAlpha, height(g / sw_)}};
        case PatchId::XY:
            return {{kAlpha, kAlpha, 0}, {height(1.0 / (g * sw_)), height(1.0 / (g * sw_)), kAlpha}};
        case PatchId::YZ:
            return {{0, kAlpha, kAlpha}, {kAlpha, height(1.0 / sw_), height(g / sw_)}};
    }
    return {};
}

double Domain::half_width() const { return kAlpha + sw_ * kPi / 2.0; }

Box Domain::physical_box() const {
    // reference half-extents from the patch boxes, then the sheared corners
    Vec3 half{};
    for (PatchId p : kAllPatches) {
        const Box b = patch_box(p);
        for (int k = 0; k < 3; ++k) half[k] = std::max(half[k], b.hi[k]);
    }
    Box out{{0, 0, 0}, {0, 0, 0}};
    for (int c = 0; c < 8; ++c) {
        const Vec3 corner{(c & 1) ? half[0] : -half[0], (c & 2) ? half[1] : -half[1], (c & 4) ? half[2] : -half[2]};
        const Vec3 X = shear_.apply(corner);
        for (int k = 0; k < 3; ++k) {
            out.lo[k] = std::min(out.lo[k], X[k]);
            out.hi[k] = std::max(out.hi[k], X[k]);
        }
    }
    return out;
}

std::optional<Location> classify(const Vec3& X, const ShapeParams& sp, const EllipticityParams& ep) {
    return Domain(sp, ep).classify(X);
}

bool contains(const Vec3& X, const ShapeParams& sp, const EllipticityParams& ep) {
    return Domain(sp, ep).contains(X);
}

// ---------------------------------------------------------------------------
// Interfaces

std::string_view to_string(InterfaceId id) {
    switch (id) {
        case InterfaceId::C_Z: return "C-Z@z";
        case InterfaceId::C_X: return "C-X@x";
        case InterfaceId::C_Y: return "C-Y@y";
        case InterfaceId::ZX_X: return "ZX-X@z";
        case InterfaceId::ZX_Z: return "ZX-Z@x";
        case InterfaceId::XY_X: return "XY-X@y";
        case InterfaceId::XY_Y: return "XY-Y@x";
        case InterfaceId::YZ_Y: return "YZ-Y@z";
        case InterfaceId::YZ_Z: return "YZ-Z@y";
        case InterfaceId::MirrorX: return "mirror@x";
        case InterfaceId::MirrorY: return "mirror@y";
        case InterfaceId::MirrorZ: return "mirror@z";
    }
    return "?";
}

Interface interface_info(InterfaceId id) {
    using P = PatchId;
    switch (id) {
        case InterfaceId::C_Z: return {id, 2, P::C, P::Z};
        case InterfaceId::C_X: return {id, 0, P::C, P::X};
        case InterfaceId::C_Y: return {id, 1, P::C, P::Y};
        case InterfaceId::ZX_X: return {id, 2, P::X, P::ZX};
        case InterfaceId::ZX_Z: return {id, 0, P::Z, P::ZX};
        case InterfaceId::XY_X: return {id, 1, P::X, P::XY};
        case InterfaceId::XY_Y: return {id, 0, P::Y, P::XY};
        case InterfaceId::YZ_Y: return {id, 2, P::Y, P::YZ};
        case InterfaceId::YZ_Z: return {id, 1, P::Z, P::YZ};
        case InterfaceId::MirrorX: return {id, 0, std::nullopt, std::nullopt};
        case InterfaceId::MirrorY: return {id, 1, std::nullopt, std::nullopt};
        case InterfaceId::MirrorZ: return {id, 2, std::nullopt, std::nullopt};
    }
    throw InternalError("unknown interface id");
}

Vec3 Interface::point(const Domain& d, double u, double v) const {
    const double sw = d.sqrt_omega();
    const double g = d.shape().gamma();
    auto raise = [&](double t) { return kAlpha + u * sw * std::asin(std::min(1.0, t)); };
    const double w = kAlpha * v;
    switch (id) {
        case InterfaceId::C_Z: return {kAlpha * u, w, kAlpha};
        case InterfaceId::C_X: return {kAlpha, kAlpha * u, w};
        case InterfaceId::C_Y: return {kAlpha * u, kAlpha, w};
        case InterfaceId::ZX_X: return {raise(std::cos(w) / sw), w, kAlpha};
        case InterfaceId::ZX_Z: return {kAlpha, w, raise(g * std::cos(w) / sw)};
        case InterfaceId::XY_X: return {raise(std::cos(w) / (g * sw)), kAlpha, w};
        case InterfaceId::XY_Y: return {kAlpha, raise(std::cos(w) / (g * sw)), w};
        case InterfaceId::YZ_Y: return {w, raise(std::cos(w) / sw), kAlpha};
        case InterfaceId::YZ_Z: return {w, kAlpha, raise(g * std::cos(w) / sw)};
        case InterfaceId::MirrorX:
        case InterfaceId::MirrorY:
        case InterfaceId::MirrorZ: {
            // Rays from the origin inside the plane, scaled to the first exit.
            const double theta = u * kPi / 2.0;
            const int axis = normal_axis;
            Vec3 dir{};
            dir[(axis + 1) % 3] = std::cos(theta);
            dir[(axis + 2) % 3] = std::sin(theta);
            const double r = boundary_along_reference(d, dir).radius;
            Vec3 p = scaled(dir, v * r);
            p[axis] = 0.0;
            return p;
        }
    }
    return {};
}

std::vector<Interface> interfaces(const Domain&) {
    std::vector<Interface> out;
    out.reserve(kAllInterfaces.size());
    for (InterfaceId id : kAllInterfaces) out.push_back(interface_info(id));
    return out;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

constexpr std::uint64_t kMaxAttempts = 1'000'000;

struct Stratum {
    std::optional<PatchId> patch;  // empty: whole reference box
    std::size_t count;
};

// Draws attempt-by-attempt from a per-sample substream until a point is
// accepted; returns nullopt when the attempt budget is exhausted.
std::optional<Sample> draw_sample(const Domain& d, const Stratum& st, const CounterRng& rng,
                                  double min_margin) {
    const double w = d.half_width();
    const Box box = st.patch ? d.patch_box(*st.patch) : Box{{-w, -w, -w}, {w, w, w}};
    for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const std::uint64_t c = attempt * 4;
        Vec3 p;
        for (int k = 0; k < 3; ++k) p[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * rng.uniform(c + k);
        if (st.patch) {
            const std::uint64_t signs = rng.bits(c + 3);
            for (int k = 0; k < 3; ++k)
                if ((signs >> k) & 1U) p[k] = -p[k];
        }
        const auto loc = d.classify_reference(p);
        if (!loc) continue;
        if (st.patch && loc->patch != *st.patch) continue;
        if (min_margin > 0.0) {
            const Vec3 q{std::abs(p[0]), std::abs(p[1]), std::abs(p[2])};
            if (d.membership_margin(loc->patch, q) < min_margin) continue;
        }
        return Sample{d.to_physical(p), *loc};
    }
    return std::nullopt;
}

}  // namespace

SampleSet sample_interior(const Domain& d, std::size_t n, std::uint64_t seed, const SampleOptions& opts) {
    SampleSet out;
    if (n == 0) return out;

    std::vector<Stratum> strata;
    if (opts.stratify) {
        const std::size_t k = opts.patches.size();
        if (k == 0) return out;
        for (std::size_t i = 0; i < k; ++i)
            strata.push_back({opts.patches[i], n / k + (i < n % k ? 1 : 0)});
    } else {
        strata.push_back({std::nullopt, n});
    }

    const CounterRng root(seed);
    for (std::size_t si = 0; si < strata.size(); ++si) {
        const Stratum& st = strata[si];
        const std::uint64_t stream = st.patch ? static_cast<std::uint64_t>(*st.patch) + 1 : 0;
        const CounterRng srng = root.split(stream);

        std::vector<std::optional<Sample>> drawn(st.count);
        // The first draw doubles as the emptiness probe.
        drawn[0] = draw_sample(d, st, srng.split(0), opts.min_margin);
        if (!drawn[0]) {
            if (st.patch) out.empty_patches.push_back(*st.patch);
            continue;
        }
        for_each_chunk(st.count - 1, 256, [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                drawn[i + 1] = draw_sample(d, st, srng.split(i + 1), opts.min_margin);
        });
        for (auto& s : drawn)
            if (s) out.samples.push_back(*s);
    }
    return out;
}

BoundaryPoint boundary_along(const Domain& d, const Vec3& direction) {
    const Box b = d.physical_box();
    const double tmax = norm(b.hi);
    return ray_exit([&](const Vec3& X) { return d.contains(X); }, direction, d.half_width() / 512.0, tmax);
}

BoundaryPoint boundary_along_reference(const Domain& d, const Vec3& direction) {
    const double w = d.half_width();
    return ray_exit([&](const Vec3& p) { return d.contains_reference(p); }, direction, w / 512.0,
                    std::sqrt(3.0) * w);
}

std::vector<BoundaryPoint> boundary_scan(const Domain& d, std::size_t n, std::uint64_t seed) {
    std::vector<BoundaryPoint> out(n);
    const CounterRng rng(seed, 0xb0);
    for_each_chunk(n, 64, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const double zc = 2.0 * rng.uniform(2 * i) - 1.0;
            const double phi = 2.0 * kPi * rng.uniform(2 * i + 1);
            const double rho = std::sqrt(std::max(0.0, 1.0 - zc * zc));
            out[i] = boundary_along(d, {rho * std::cos(phi), rho * std::sin(phi), zc});
        }
    });
    return out;
}

}  // namespace pucci3d
