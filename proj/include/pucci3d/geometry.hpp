#pragma once

// The seven-patch first-octant domain, its reflection to the full domain,
// the shear map C_a, patch interfaces, and point sampling.

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "pucci3d/symmat.hpp"

namespace pucci3d {

inline constexpr double kAlpha = std::numbers::pi / 2.0;

/// Patches in canonical order; a point on an interface belongs to the first.
enum class PatchId : std::uint8_t { C, X, Y, Z, ZX, XY, YZ };

inline constexpr std::array<PatchId, 7> kAllPatches{PatchId::C,  PatchId::X,  PatchId::Y, PatchId::Z,
                                                     PatchId::ZX, PatchId::XY, PatchId::YZ};

std::string_view to_string(PatchId p);
std::optional<PatchId> patch_from_string(std::string_view s);

/// Patch of the folded point plus the octant signs it was folded from.
struct Location {
    PatchId patch;
    std::array<int, 3> octant;  // each +1 or -1

    bool operator==(const Location&) const = default;
};

/// Shape parameters (gamma, a) with the derived shear quantities.
class ShapeParams {
public:
    /// Throws ParameterError unless gamma lies in [omega^{-1/2}, omega^{1/2}]
    /// and |a| < pi.
    static ShapeParams make(double gamma, double a, const EllipticityParams& ep);

    double gamma() const { return gamma_; }
    double a() const { return a_; }
    /// s(a) = sqrt(1 - (a/pi)^2)
    double s() const { return s_; }
    /// kappa(a) = 1/s(a)
    double kappa() const { return 1.0 / s_; }
    /// beta(a) = 2a^2/pi^2 - 1
    double beta() const;
    double det_shear() const { return s_ * s_; }

    Mat3 shear() const;
    Mat3 shear_inverse() const;

private:
    ShapeParams(double gamma, double a, double s) : gamma_(gamma), a_(a), s_(s) {}
    double gamma_;
    double a_;
    double s_;
};

/// Closed range [lo, hi] of admissible gamma for a given omega.
std::array<double, 2> admissible_gamma(const EllipticityParams& ep);

/// Axis-aligned box.
struct Box {
    Vec3 lo{};
    Vec3 hi{};
    double volume() const { return (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]); }
};

/// Reference domain for fixed (omega, gamma) together with its image under C_a.
/// Methods suffixed `_reference` act on unsheared coordinates; the others act
/// on physical coordinates X = C_a p.
class Domain {
public:
    Domain(const ShapeParams& shape, const EllipticityParams& ep);

    const ShapeParams& shape() const { return shape_; }
    const EllipticityParams& ellipticity() const { return ep_; }
    double sqrt_omega() const { return sw_; }

    /// Signed slack of the membership inequalities of `patch` at a first-octant
    /// point; >= 0 iff the point lies in the closed patch. Inverse-trig
    /// arguments outside [0, 1] give a negative slack.
    double membership_margin(PatchId patch, const Vec3& q) const;

    std::optional<Location> classify_reference(const Vec3& p) const;
    bool contains_reference(const Vec3& p) const { return classify_reference(p).has_value(); }

    Vec3 to_reference(const Vec3& X) const;
    Vec3 to_physical(const Vec3& p) const;
    std::optional<Location> classify(const Vec3& X) const;
    bool contains(const Vec3& X) const { return classify(X).has_value(); }

    /// First-octant coordinate box of a patch, derived from its constraints.
    Box patch_box(PatchId patch) const;
    /// alpha + sqrt(omega) * pi/2: half-width of a cube enclosing the reference domain.
    double half_width() const;
    /// Box enclosing the physical (sheared) domain.
    Box physical_box() const;

private:
    bool in_patch(PatchId patch, const Vec3& q) const { return membership_margin(patch, q) >= 0.0; }

    ShapeParams shape_;
    EllipticityParams ep_;
    double sw_;
    Mat3 shear_;
    Mat3 shear_inv_;
};

std::optional<Location> classify(const Vec3& X, const ShapeParams& sp, const EllipticityParams& ep);
bool contains(const Vec3& X, const ShapeParams& sp, const EllipticityParams& ep);

/// Throws ParameterError unless |a| < pi.
Vec3 shear_forward(const Vec3& p, double a);
Vec3 shear_inverse(const Vec3& X, double a);

// ---------------------------------------------------------------------------
// Interfaces

enum class InterfaceId : std::uint8_t {
    C_Z, C_X, C_Y, ZX_X, ZX_Z, XY_X, XY_Y, YZ_Y, YZ_Z, MirrorX, MirrorY, MirrorZ
};

inline constexpr std::array<InterfaceId, 12> kAllInterfaces{
    InterfaceId::C_Z,  InterfaceId::C_X,  InterfaceId::C_Y,     InterfaceId::ZX_X,
    InterfaceId::ZX_Z, InterfaceId::XY_X, InterfaceId::XY_Y,    InterfaceId::YZ_Y,
    InterfaceId::YZ_Z, InterfaceId::MirrorX, InterfaceId::MirrorY, InterfaceId::MirrorZ};

std::string_view to_string(InterfaceId id);

/// A patch interface in reference coordinates. For the three reflection
/// planes `side_b` is empty: the other side is the mirror image of side a.
struct Interface {
    InterfaceId id;
    int normal_axis;
    std::optional<PatchId> side_a;  // empty for mirror planes (varies along the trace)
    std::optional<PatchId> side_b;

    /// Maps (u, v) in [0,1]^2 onto the interface trace.
    Vec3 point(const Domain& d, double u, double v) const;
    bool is_mirror() const { return !side_b.has_value(); }
};

std::vector<Interface> interfaces(const Domain& d);
Interface interface_info(InterfaceId id);

// ---------------------------------------------------------------------------
// Sampling

struct Sample {
    Vec3 point;  // physical coordinates
    Location location;
};

struct SampleOptions {
    bool stratify = false;
    std::vector<PatchId> patches{kAllPatches.begin(), kAllPatches.end()};
    /// Reject points whose membership slack in their own patch is below this.
    double min_margin = 0.0;
};

struct SampleSet {
    std::vector<Sample> samples;
    std::vector<PatchId> empty_patches;  // requested strata with no admissible point
};

/// Deterministic rejection sampling of interior points.
SampleSet sample_interior(const Domain& d, std::size_t n, std::uint64_t seed,
                          const SampleOptions& opts = {});

struct BoundaryPoint {
    Vec3 point;      // last inside point of the bracketing interval
    Vec3 direction;  // unit ray direction from the origin
    double radius;   // distance from the origin to `point`
};

/// First exit of the ray t*dir from the physical domain, bracketed to 1e-12.
BoundaryPoint boundary_along(const Domain& d, const Vec3& direction);
/// Same for the reference (unsheared) domain.
BoundaryPoint boundary_along_reference(const Domain& d, const Vec3& direction);
/// n uniformly random ray directions.
std::vector<BoundaryPoint> boundary_scan(const Domain& d, std::size_t n, std::uint64_t seed);

}  // namespace pucci3d
