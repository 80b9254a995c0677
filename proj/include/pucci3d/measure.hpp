#pragma once

// Volumes of the domain family, volume derivatives in gamma, the
// normalized functional, and the four appendix kernel integrals.

#include <array>
#include <cstdint>
#include <string>

#include "pucci3d/geometry.hpp"
#include "pucci3d/report.hpp"

namespace pucci3d {

struct VolumeReport {
    double V = 0.0;
    double error = 0.0;          // quadrature error estimate or MC standard error
    std::string method;          // "quadrature" | "monte-carlo"
    std::array<double, 7> per_patch{};        // full domain (all eight octants)
    std::array<double, 7> per_patch_error{};
    json params;

    json to_json() const;
};

/// Nested tanh-sinh quadrature over the patch graphs, a = 0 only.
/// Throws QuadratureBudget when the error estimate exceeds rel_tol * V.
VolumeReport volume_quadrature(const Domain& d, double rel_tol = 1e-8);

/// Hit-or-miss over the physical bounding box; handles a != 0 directly.
VolumeReport volume_mc(const Domain& d, std::size_t n, std::uint64_t seed);

/// Central difference of quadrature volumes, (V(g+h) - V(g-h)) / 2h.
double volume_derivative(double gamma, const EllipticityParams& ep, double h = 1e-3);

/// lambda V^{2/3} (1 - a^2/pi^2)^{-1/3} for the domain scaled by `scale`
/// (volume scale^3 V, eigenvalue lambda / scale^2). V is the unsheared volume.
double normalized_functional(double V, double a, const EllipticityParams& ep, double scale = 1.0);
double normalized_functional(const ShapeParams& sp, const EllipticityParams& ep, double scale = 1.0);

struct KernelValue {
    double value = 0.0;
    double error = 0.0;
    bool diverged = false;   // the integral is +infinity at this gamma
    bool converged = true;   // error estimate within tolerance

    json to_json() const;
};

struct KernelIntegrals {
    KernelValue k1, k2, h_plus, h_minus;
    json to_json() const;
};

/// I[K1], I[K2] over t in [0, 1) and I[H+], I[H-] over t in [0, pi/2).
KernelIntegrals kernel_integrals(double gamma, const EllipticityParams& ep, double rel_tol = 1e-10);

}  // namespace pucci3d
