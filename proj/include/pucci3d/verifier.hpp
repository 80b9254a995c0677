#pragma once

// Sampled verification suites. Each returns a worst-case statistic, the
// point where it occurs, and a pass flag against a fixed tolerance.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pucci3d/eigenfield.hpp"
#include "pucci3d/report.hpp"

namespace pucci3d {

struct VerificationReport {
    std::string suite;
    json params;  // omega, gamma, a, lambda, Lambda, n, seed
    std::string statistic_name;
    double statistic = 0.0;
    std::optional<Vec3> witness;
    double tolerance = 0.0;
    bool pass = false;
    json extra = json::object();

    json to_json() const;
};

/// max |-M+(D^2 u) - lambda u| over stratified interior samples of the
/// unsheared domain; tolerance 1e-9 lambda (2 gamma + 1).
VerificationReport residual_suite(const Domain& d, std::size_t n, std::uint64_t seed,
                                  const FieldTweaks& tweaks = {});

/// Value and gradient jumps across all twelve interfaces, n points each.
VerificationReport c1_suite(const Domain& d, std::size_t n, std::uint64_t seed,
                            const FieldTweaks& tweaks = {});

/// max |u| at n ray exits, plus min u on the same points pulled inward by
/// 1 - 1e-6 and on n interior samples. Boundary points with u > 1e-6 are
/// listed as closure gaps.
VerificationReport boundary_suite(const Domain& d, std::size_t n, std::uint64_t seed,
                                  const FieldTweaks& tweaks = {});

/// min of -M+(D^2 u_a) - lambda kappa^2 u_a over sheared samples, with the
/// X-cap maximum as strictness witness.
VerificationReport shear_bound_suite(const Domain& d, std::size_t n, std::uint64_t seed,
                                     const FieldTweaks& tweaks = {});

/// Closed-form block eigenvalues against the assembled 2x2 block for n
/// random (p, q, a).
VerificationReport block_identity_suite(std::size_t n, std::uint64_t seed);

using FieldFn = std::function<std::pair<double, SymMatrix3>(const Vec3&)>;

struct SupersolutionBound {
    double bound;  // inf over samples of -M+(H) / value
    Vec3 witness;
};

/// Throws InvalidInput when the field is not positive at some sample.
SupersolutionBound supersolution_bound(const FieldFn& field, const std::vector<Vec3>& points,
                                       const EllipticityParams& ep);

/// supersolution_bound of the sheared eigenfunction, expected lambda kappa^2.
VerificationReport supersolution_suite(const Domain& d, std::size_t n, std::uint64_t seed);

}  // namespace pucci3d
