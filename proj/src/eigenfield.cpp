#include "pucci3d/eigenfield.hpp"

#include <cmath>
#include <numbers>

#include "pucci3d/error.hpp"

namespace pucci3d {

namespace {

constexpr double kSignTau = 1e-12;

int sign_of(double v) { return v > kSignTau ? 1 : (v < -kSignTau ? -1 : 0); }

// Axes lifted past alpha in each patch (x, y, z).
constexpr std::array<std::array<bool, 3>, 7> kRaised{{
    {false, false, false},  // C
    {true, false, false},   // X
    {false, true, false},   // Y
    {false, false, true},   // Z
    {true, false, true},    // ZX
    {true, true, false},    // XY
    {false, true, true},    // YZ
}};

}  // namespace

FieldTweaks::FieldTweaks() {
    for (auto& row : amplitude) row.fill(1.0);
    for (auto& row : frequency) row.fill(1.0);
}

bool FieldTweaks::is_identity() const {
    for (int i = 0; i < 7; ++i)
        for (int k = 0; k < 3; ++k)
            if (amplitude[i][k] != 1.0 || frequency[i][k] != 1.0) return false;
    return quadratic_x == 0.0;
}

Eigenfield::Eigenfield(const Domain& domain, FieldTweaks tweaks)
    : domain_(domain), tweaks_(tweaks), plain_(tweaks.is_identity()) {}

PatchEval Eigenfield::eval_patch(PatchId patch, const Vec3& q) const {
    const auto pi = static_cast<std::size_t>(patch);
    const double sw = domain_.sqrt_omega();
    const double g = domain_.shape().gamma();
    const std::array<double, 3> amp{g, g, 1.0};

    PatchEval e;
    e.location = {patch, {1, 1, 1}};
    std::array<double, 3> dd{};
    for (int k = 0; k < 3; ++k) {
        const double A = plain_ ? amp[k] : amp[k] * tweaks_.amplitude[pi][k];
        const double f = plain_ ? 1.0 : tweaks_.frequency[pi][k];
        if (kRaised[pi][k]) {
            const double s = f * (q[k] - kAlpha) / sw;
            const double sn = std::sin(s);
            e.value -= A * sw * sn;
            e.gradient[k] = -A * f * std::cos(s);
            dd[k] = A * f * f * sn / sw;
        } else {
            const double c = f * q[k];
            e.value += A * std::cos(c);
            e.gradient[k] = -A * f * std::sin(c);
            dd[k] = -A * f * f * std::cos(c);
        }
    }
    if (!plain_ && tweaks_.quadratic_x != 0.0) {
        e.value += tweaks_.quadratic_x * q[0] * q[0];
        e.gradient[0] += 2.0 * tweaks_.quadratic_x * q[0];
        dd[0] += 2.0 * tweaks_.quadratic_x;
    }
    e.hessian = SymMatrix3::diagonal(dd[0], dd[1], dd[2]);
    e.p = dd[0];
    e.q = dd[1];
    e.r = dd[2];
    e.inertia = {sign_of(dd[0]), sign_of(dd[1]), sign_of(dd[2])};
    return e;
}

PatchEval Eigenfield::reflect(PatchEval e, const std::array<int, 3>& octant) const {
    e.location.octant = octant;
    for (int k = 0; k < 3; ++k)
        if (octant[k] < 0) e.gradient[k] = -e.gradient[k];
    return e;
}

PatchEval Eigenfield::eval(const Vec3& p) const {
    const auto loc = domain_.classify_reference(p);
    if (!loc) throw DomainError("point outside the domain");
    const Vec3 q{std::abs(p[0]), std::abs(p[1]), std::abs(p[2])};
    return reflect(eval_patch(loc->patch, q), loc->octant);
}

PatchEval Eigenfield::eval_sheared(const Vec3& X) const {
    const ShapeParams& sp = domain_.shape();
    if (sp.a() == 0.0) return eval(X);
    PatchEval e = eval(domain_.to_reference(X));
    const Mat3 C = sp.shear();
    e.hessian = congruence(C, e.hessian);
    // grad_X u(C^{-1} X) = C^{-T} grad_p u
    e.gradient = sp.shear_inverse().transposed().apply(e.gradient);
    return e;
}

BlockSpectrum block_spectrum(double p, double q, double r, double a) {
    if (!(std::abs(a) < std::numbers::pi)) throw ParameterError("shear parameter must satisfy |a| < pi");
    const double ra = a / std::numbers::pi;
    const double k2 = 1.0 / (1.0 - ra * ra);
    const double beta = 2.0 * ra * ra - 1.0;
    const double disc = std::sqrt(std::max(0.0, p * p + q * q + 2.0 * beta * p * q));
    return {0.5 * k2 * (p + q + disc), 0.5 * k2 * (p + q - disc), k2 * r};
}

std::array<double, 3> sheared_block(double p, double q, double a) {
    const ShapeParams sp = ShapeParams::make(1.0, a, EllipticityParams::from_ratio(1.0));
    const SymMatrix3 B = congruence(sp.shear(), SymMatrix3::diagonal(p, q, 1.0));
    return {B.m11, B.m12, B.m22};
}

SeparableResidual separable_candidate_residual(double x, int n, const EllipticityParams& ep) {
    if (n < 2) throw ParameterError("dimension n must be at least 2");
    const double theta = x / std::sqrt(static_cast<double>(n));
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double cn2 = std::pow(c, n - 2);
    const double u = cn2 * c * c;
    const double diag = -u / n;
    const double off = cn2 * s * s / n;
    const double lam = ep.lambda(), Lam = ep.Lambda();

    SeparableResidual out{};
    // spectrum of diag*I + off*(J - I): diag - off (n-1 times), diag + (n-1) off
    const double outlier = diag + (n - 1) * off;
    out.precondition_ok = outlier > 0.0;
    if (n == 3) {
        const SymMatrix3 H(diag, diag, diag, off, off, off);
        out.residual = -pucci_plus(H, ep) - lam * u;
    } else {
        const double rest = diag - off;
        auto weight = [&](double e) { return e > 0 ? Lam * e : lam * e; };
        out.residual = -(weight(outlier) + (n - 1) * weight(rest)) - lam * u;
    }
    out.closed_form = (Lam - lam) * cn2 * (c * c - static_cast<double>(n - 1) / n);
    return out;
}

}  // namespace pucci3d
