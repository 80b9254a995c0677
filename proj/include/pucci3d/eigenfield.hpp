#pragma once

// The piecewise eigenfunction u on the reflected domain, with gradient and
// analytic Hessian, plus the sheared pull-back.

#include <array>
#include <optional>

#include "pucci3d/geometry.hpp"
#include "pucci3d/symmat.hpp"

namespace pucci3d {

struct PatchEval {
    Location location;
    double value = 0.0;
    Vec3 gradient{};
    SymMatrix3 hessian;
    // diagonal Hessian of the unsheared field at the pulled-back point
    double p = 0.0, q = 0.0, r = 0.0;
    std::array<int, 3> inertia{};  // signs of (p, q, r), 0 within 1e-12
};

/// Coefficient perturbations for mutation tests. All multipliers default to 1.
struct FieldTweaks {
    // [patch][axis]: scales the amplitude / inner frequency of that axis term
    std::array<std::array<double, 3>, 7> amplitude;
    std::array<std::array<double, 3>, 7> frequency;
    double quadratic_x = 0.0;  // adds eps * x^2 to every patch

    FieldTweaks();
    bool is_identity() const;
};

class Eigenfield {
public:
    explicit Eigenfield(const Domain& domain, FieldTweaks tweaks = {});

    const Domain& domain() const { return domain_; }

    /// Reference coordinates; throws DomainError outside the closed domain.
    PatchEval eval(const Vec3& p) const;
    /// Physical coordinates X = C_a p; Hessian is the congruence by C_a.
    PatchEval eval_sheared(const Vec3& X) const;
    /// Formula of `patch` at the first-octant point q, no membership test.
    PatchEval eval_patch(PatchId patch, const Vec3& q) const;

private:
    PatchEval reflect(PatchEval e, const std::array<int, 3>& octant) const;

    Domain domain_;
    FieldTweaks tweaks_;
    bool plain_;
};

struct BlockSpectrum {
    double mu_plus;
    double mu_minus;
    double mu3;
};

/// Eigenvalues of the upper-left block of C_a^{-T} diag(p,q,r) C_a^{-1}
/// by the closed form in kappa(a), beta(a); mu3 = kappa^2 r.
BlockSpectrum block_spectrum(double p, double q, double r, double a);

/// The same block assembled explicitly: (b11, b12, b22).
std::array<double, 3> sheared_block(double p, double q, double a);

struct SeparableResidual {
    double residual;      // -M+(D^2 u_sep) - lambda u_sep at (x, ..., x)
    double closed_form;   // (Lambda-lambda) c^{n-2} (c^2 - (n-1)/n)
    bool precondition_ok; // outlier eigenvalue positive
};

/// Candidate u_sep = prod cos(x_i / sqrt(n)) on the diagonal. n = 3 goes
/// through the 3x3 Pucci evaluation; other n >= 2 use the known spectrum.
SeparableResidual separable_candidate_residual(double x, int n, const EllipticityParams& ep);

}  // namespace pucci3d
