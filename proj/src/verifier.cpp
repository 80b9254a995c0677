#include "pucci3d/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "pucci3d/error.hpp"
#include "pucci3d/parallel.hpp"
#include "pucci3d/rng.hpp"

namespace pucci3d {

namespace {

constexpr std::size_t kChunk = 512;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Running maximum that keeps the first index attaining it, so any chunking
// reduces to the serial answer.
struct Worst {
    double value = -kInf;
    Vec3 witness{};
    bool seen = false;

    void offer(double v, const Vec3& w) {
        if (!seen || v > value) {
            value = v;
            witness = w;
            seen = true;
        }
    }
    void merge(const Worst& o) {
        if (o.seen) offer(o.value, o.witness);
    }
};

template <class Fn>
Worst reduce_max(std::size_t n, Fn&& fn) {
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<Worst> part(chunks);
    for_each_chunk(n, kChunk, [&](std::size_t c, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) fn(i, part[c]);
    });
    Worst out;
    for (const auto& w : part) out.merge(w);
    return out;
}

json base_params(const Domain& d, std::size_t n, std::uint64_t seed) {
    json p = params_json(d.shape(), d.ellipticity());
    p["n"] = n;
    p["seed"] = seed;
    return p;
}

Domain unsheared(const Domain& d) {
    return Domain(ShapeParams::make(d.shape().gamma(), 0.0, d.ellipticity()), d.ellipticity());
}

json patch_list(const std::vector<PatchId>& ps) {
    json out = json::array();
    for (PatchId p : ps) out.push_back(std::string(to_string(p)));
    return out;
}

}  // namespace

json VerificationReport::to_json() const {
    json j;
    j["schema"] = kSchemaVersion;
    j["suite"] = suite;
    j["params"] = params;
    j["statistic_name"] = statistic_name;
    j["statistic"] = number(statistic);
    j["witness"] = witness ? pucci3d::to_json(*witness) : json(nullptr);
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    j["extra"] = extra;
    return j;
}

// ---------------------------------------------------------------------------

VerificationReport residual_suite(const Domain& d, std::size_t n, std::uint64_t seed,
                                  const FieldTweaks& tweaks) {
    const Domain ref = unsheared(d);
    const Eigenfield field(ref, tweaks);
    const EllipticityParams& ep = ref.ellipticity();
    SampleOptions opts;
    opts.stratify = true;
    const SampleSet set = sample_interior(ref, n, seed, opts);

    std::array<Worst, 7> per_patch;
    const std::size_t m = set.samples.size();
    const std::size_t chunks = (m + kChunk - 1) / kChunk;
    std::vector<std::array<Worst, 7>> part(chunks);
    std::vector<std::size_t> inertia_bad(chunks, 0);
    for_each_chunk(m, kChunk, [&](std::size_t c, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Sample& s = set.samples[i];
            const PatchEval ev = field.eval(s.point);
            const double res = std::abs(-pucci_plus(ev.hessian, ep) - ep.lambda() * ev.value);
            part[c][static_cast<std::size_t>(s.location.patch)].offer(res, s.point);
        }
    });
    for (const auto& arr : part)
        for (std::size_t k = 0; k < 7; ++k) per_patch[k].merge(arr[k]);

    Worst all;
    json by_patch = json::object();
    for (std::size_t k = 0; k < 7; ++k) {
        all.merge(per_patch[k]);
        if (per_patch[k].seen) by_patch[std::string(to_string(kAllPatches[k]))] = per_patch[k].value;
    }

    VerificationReport r;
    r.suite = "residual";
    r.params = base_params(ref, n, seed);
    r.statistic_name = "max_abs_residual";
    r.statistic = all.seen ? all.value : 0.0;
    if (all.seen) r.witness = all.witness;
    r.tolerance = 1e-9 * ep.lambda() * (2.0 * ref.shape().gamma() + 1.0);
    r.pass = r.statistic <= r.tolerance;
    r.extra["samples"] = m;
    r.extra["per_patch"] = by_patch;
    r.extra["empty_patches"] = patch_list(set.empty_patches);
    return r;
}

// ---------------------------------------------------------------------------

VerificationReport c1_suite(const Domain& d, std::size_t n, std::uint64_t seed, const FieldTweaks& tweaks) {
    const Domain ref = unsheared(d);
    const Eigenfield field(ref, tweaks);
    const CounterRng root(seed, 0xc1);

    Worst value_jump, grad_jump;
    json per = json::object();
    for (InterfaceId id : kAllInterfaces) {
        const Interface itf = interface_info(id);
        const CounterRng rng = root.split(static_cast<std::uint64_t>(id));
        Worst vj, gj;
        const std::size_t chunks = (n + kChunk - 1) / kChunk;
        std::vector<Worst> pv(chunks), pg(chunks);
        for_each_chunk(n, kChunk, [&](std::size_t c, std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                const Vec3 q = itf.point(ref, rng.uniform(2 * i), rng.uniform(2 * i + 1));
                if (itf.is_mirror()) {
                    const auto loc = ref.classify_reference(q);
                    if (!loc) throw InternalError("mirror trace point left the domain");
                    const PatchEval ev = field.eval_patch(loc->patch, q);
                    pv[c].offer(0.0, q);
                    pg[c].offer(2.0 * std::abs(ev.gradient[itf.normal_axis]), q);
                } else {
                    const PatchEval ea = field.eval_patch(*itf.side_a, q);
                    const PatchEval eb = field.eval_patch(*itf.side_b, q);
                    double g = 0.0;
                    for (int k = 0; k < 3; ++k) g = std::max(g, std::abs(ea.gradient[k] - eb.gradient[k]));
                    pv[c].offer(std::abs(ea.value - eb.value), q);
                    pg[c].offer(g, q);
                }
            }
        });
        for (std::size_t c = 0; c < chunks; ++c) {
            vj.merge(pv[c]);
            gj.merge(pg[c]);
        }
        per[std::string(to_string(id))] = {{"value_jump", vj.seen ? vj.value : 0.0},
                                           {"gradient_jump", gj.seen ? gj.value : 0.0}};
        value_jump.merge(vj);
        grad_jump.merge(gj);
    }

    VerificationReport r;
    r.suite = "c1";
    r.params = base_params(ref, n, seed);
    r.statistic_name = "max_jump";
    r.tolerance = 1e-12;
    const Worst& worst = grad_jump.value > value_jump.value ? grad_jump : value_jump;
    r.statistic = worst.seen ? worst.value : 0.0;
    if (worst.seen) r.witness = worst.witness;
    r.pass = value_jump.value <= r.tolerance && grad_jump.value <= r.tolerance;
    r.extra["max_value_jump"] = value_jump.seen ? value_jump.value : 0.0;
    r.extra["max_gradient_jump"] = grad_jump.seen ? grad_jump.value : 0.0;
    r.extra["per_interface"] = per;
    return r;
}

// ---------------------------------------------------------------------------

VerificationReport boundary_suite(const Domain& d, std::size_t n, std::uint64_t seed,
                                  const FieldTweaks& tweaks) {
    const Domain ref = unsheared(d);
    const Eigenfield field(ref, tweaks);
    constexpr double kGap = 1e-6;
    constexpr double kShrink = 1.0 - 1e-6;

    // Rays in the reference domain; the shear maps boundary to boundary.
    const CounterRng rng(seed, 0xb0);
    std::vector<BoundaryPoint> pts(n);
    for_each_chunk(n, 64, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const double zc = 2.0 * rng.uniform(2 * i) - 1.0;
            const double phi = 2.0 * std::numbers::pi * rng.uniform(2 * i + 1);
            const double rho = std::sqrt(std::max(0.0, 1.0 - zc * zc));
            pts[i] = boundary_along_reference(ref, {rho * std::cos(phi), rho * std::sin(phi), zc});
        }
    });

    std::vector<double> values(n);
    const Worst on_boundary = reduce_max(n, [&](std::size_t i, Worst& w) {
        values[i] = field.eval(pts[i].point).value;
        w.offer(std::abs(values[i]), pts[i].point);
    });
    // minimum of u as a maximum of -u
    const Worst shrunk = reduce_max(n, [&](std::size_t i, Worst& w) {
        const Vec3 p{pts[i].point[0] * kShrink, pts[i].point[1] * kShrink, pts[i].point[2] * kShrink};
        w.offer(-field.eval(p).value, p);
    });
    SampleOptions opts;
    opts.stratify = true;
    const SampleSet inner = sample_interior(ref, n, seed ^ 0x5eedULL, opts);
    const Worst interior = reduce_max(inner.samples.size(), [&](std::size_t i, Worst& w) {
        const Vec3& p = inner.samples[i].point;
        w.offer(-field.eval(p).value, p);
    });

    json gaps = json::array();
    std::size_t gap_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (values[i] <= kGap) continue;
        ++gap_count;
        if (gaps.size() < 16)
            gaps.push_back({{"point", to_json(pts[i].point)},
                            {"direction", to_json(pts[i].direction)},
                            {"u", values[i]}});
    }

    Worst min_u = shrunk;
    min_u.merge(interior);

    VerificationReport r;
    r.suite = "boundary";
    r.params = base_params(ref, n, seed);
    r.statistic_name = "max_abs_u_on_boundary";
    r.statistic = on_boundary.seen ? on_boundary.value : 0.0;
    if (on_boundary.seen) r.witness = on_boundary.witness;
    r.tolerance = 1e-8;
    const double min_inner = min_u.seen ? -min_u.value : kInf;
    r.pass = r.statistic <= r.tolerance && min_inner > 0.0;
    r.extra["min_u_interior"] = number(min_inner);
    if (min_u.seen) r.extra["min_u_witness"] = to_json(min_u.witness);
    r.extra["closure_gap_count"] = gap_count;
    r.extra["closure_gaps"] = gaps;
    return r;
}

// ---------------------------------------------------------------------------

VerificationReport shear_bound_suite(const Domain& d, std::size_t n, std::uint64_t seed,
                                     const FieldTweaks& tweaks) {
    const Eigenfield field(d, tweaks);
    const EllipticityParams& ep = d.ellipticity();
    const ShapeParams& sp = d.shape();
    const double k2 = sp.kappa() * sp.kappa();
    SampleOptions opts;
    opts.stratify = true;
    const SampleSet set = sample_interior(d, n, seed, opts);
    const std::size_t m = set.samples.size();

    struct Part {
        Worst neg_min, abs_max, xcap;
    };
    const std::size_t chunks = (m + kChunk - 1) / kChunk;
    std::vector<Part> part(chunks);
    for_each_chunk(m, kChunk, [&](std::size_t c, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Sample& s = set.samples[i];
            const PatchEval ev = field.eval_sheared(s.point);
            const double margin = -pucci_plus(ev.hessian, ep) - ep.lambda() * k2 * ev.value;
            part[c].neg_min.offer(-margin, s.point);
            part[c].abs_max.offer(std::abs(margin), s.point);
            if (s.location.patch == PatchId::X) part[c].xcap.offer(margin, s.point);
        }
    });
    Part all;
    for (const Part& p : part) {
        all.neg_min.merge(p.neg_min);
        all.abs_max.merge(p.abs_max);
        all.xcap.merge(p.xcap);
    }

    const bool strict_expected = ep.omega() > 1.0 && sp.a() != 0.0;
    const bool equality_expected = !strict_expected;
    constexpr double kEqualityTol = 1e-10;

    VerificationReport r;
    r.suite = "shear_bound";
    r.params = base_params(d, n, seed);
    r.statistic_name = "min_margin";
    r.statistic = all.neg_min.seen ? -all.neg_min.value : 0.0;
    if (all.neg_min.seen) r.witness = all.neg_min.witness;
    r.tolerance = -1e-9 * ep.lambda();
    const double xmax = all.xcap.seen ? all.xcap.value : -kInf;
    const double absmax = all.abs_max.seen ? all.abs_max.value : 0.0;
    r.pass = r.statistic >= r.tolerance;
    if (strict_expected) r.pass = r.pass && xmax > 0.0;
    if (equality_expected) r.pass = r.pass && absmax <= kEqualityTol;
    r.extra["samples"] = m;
    r.extra["lower_bound_factor"] = ep.lambda() * k2;
    r.extra["strict_expected"] = strict_expected;
    r.extra["xcap_max_margin"] = number(xmax);
    if (all.xcap.seen) r.extra["xcap_witness"] = to_json(all.xcap.witness);
    r.extra["max_abs_margin"] = absmax;
    r.extra["equality_tolerance"] = kEqualityTol;
    r.extra["empty_patches"] = patch_list(set.empty_patches);
    return r;
}

// ---------------------------------------------------------------------------

VerificationReport block_identity_suite(std::size_t n, std::uint64_t seed) {
    const CounterRng rng(seed, 0xb1);
    constexpr double kPi = std::numbers::pi;

    struct Part {
        Worst spec, kappa;
    };
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<Part> part(chunks);
    for_each_chunk(n, kChunk, [&](std::size_t c, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const double p = 20.0 * rng.uniform(3 * i) - 10.0;
            const double q = 20.0 * rng.uniform(3 * i + 1) - 10.0;
            const double a = 0.95 * kPi * (2.0 * rng.uniform(3 * i + 2) - 1.0);
            const Vec3 w{p, q, a};

            const BlockSpectrum bs = block_spectrum(p, q, 0.0, a);
            const auto [b11, b12, b22] = sheared_block(p, q, a);
            const double mean = 0.5 * (b11 + b22);
            const double rad = std::hypot(0.5 * (b11 - b22), b12);
            const double ra = a / kPi;
            const double k2 = 1.0 / (1.0 - ra * ra);
            const double beta = 2.0 * ra * ra - 1.0;
            const double scale = k2 * (std::abs(p) + std::abs(q));

            double err = 0.0;
            err = std::max(err, std::abs(bs.mu_plus - (mean + rad)) / scale);
            err = std::max(err, std::abs(bs.mu_minus - (mean - rad)) / scale);
            err = std::max(err, std::abs(bs.mu_plus + bs.mu_minus - k2 * (p + q)) / scale);
            err = std::max(err, std::abs(bs.mu_plus * bs.mu_minus - k2 * p * q) / (scale * scale));
            err = std::max(err, std::abs(b11 + b22 - k2 * (p + q)) / scale);
            err = std::max(err, std::abs(b11 * b22 - b12 * b12 - k2 * p * q) / (scale * scale));
            part[c].spec.offer(err, w);
            part[c].kappa.offer(std::abs(k2 * (1.0 - beta) / 2.0 - 1.0), w);
        }
    });
    Part all;
    for (const Part& p : part) {
        all.spec.merge(p.spec);
        all.kappa.merge(p.kappa);
    }

    VerificationReport r;
    r.suite = "block_identity";
    r.params = {{"n", n}, {"seed", seed}};
    r.statistic_name = "max_relative_error";
    r.statistic = all.spec.seen ? all.spec.value : 0.0;
    if (all.spec.seen) r.witness = all.spec.witness;
    r.tolerance = 1e-12;
    const double kerr = all.kappa.seen ? all.kappa.value : 0.0;
    r.pass = r.statistic <= r.tolerance && kerr <= 1e-14;
    r.extra["witness_is"] = "(p, q, a)";
    r.extra["max_kappa_beta_error"] = kerr;
    r.extra["kappa_beta_tolerance"] = 1e-14;
    return r;
}

// ---------------------------------------------------------------------------

SupersolutionBound supersolution_bound(const FieldFn& field, const std::vector<Vec3>& points,
                                       const EllipticityParams& ep) {
    if (points.empty()) throw InvalidInput("supersolution bound needs at least one sample");
    const Worst w = reduce_max(points.size(), [&](std::size_t i, Worst& acc) {
        const auto [value, H] = field(points[i]);
        if (!(value > 0.0)) throw InvalidInput("certificate invalid: field is not positive at a sample");
        acc.offer(pucci_plus(H, ep) / value, points[i]);  // max of -ratio
    });
    return {-w.value, w.witness};
}

VerificationReport supersolution_suite(const Domain& d, std::size_t n, std::uint64_t seed) {
    const Eigenfield field(d);
    const EllipticityParams& ep = d.ellipticity();
    SampleOptions opts;
    opts.stratify = true;
    opts.min_margin = 1e-3;
    const SampleSet set = sample_interior(d, n, seed, opts);
    std::vector<Vec3> pts;
    pts.reserve(set.samples.size());
    for (const auto& s : set.samples) pts.push_back(s.point);

    const SupersolutionBound b = supersolution_bound(
        [&](const Vec3& X) {
            const PatchEval e = field.eval_sheared(X);
            return std::pair{e.value, e.hessian};
        },
        pts, ep);

    const double k2 = d.shape().kappa() * d.shape().kappa();
    const double expected = ep.lambda() * k2;
    VerificationReport r;
    r.suite = "supersolution";
    r.params = base_params(d, n, seed);
    r.statistic_name = "inf_ratio";
    r.statistic = b.bound;
    r.witness = b.witness;
    r.tolerance = 1e-9 * ep.lambda();
    r.pass = b.bound >= expected - r.tolerance;
    if (d.shape().a() == 0.0) r.pass = r.pass && std::abs(b.bound - expected) <= r.tolerance;
    r.extra["expected_lower_bound"] = expected;
    r.extra["samples"] = pts.size();
    return r;
}

}  // namespace pucci3d
