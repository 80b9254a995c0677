#pragma once

// Symmetric 3x3 algebra and the Pucci extremal operators.

#include <array>
#include <cstdint>

namespace pucci3d {

using Vec3 = std::array<double, 3>;

/// Dense row-major 3x3 matrix (shear maps, coefficient frames).
struct Mat3 {
    std::array<double, 9> a{};

    static Mat3 identity();
    double& operator()(int i, int j) { return a[3 * i + j]; }
    double operator()(int i, int j) const { return a[3 * i + j]; }

    double determinant() const;
    Mat3 transposed() const;
    /// Throws SingularMatrix when |det| is below 1e-14 * max|entry|^3.
    Mat3 inverse() const;
    Vec3 apply(const Vec3& v) const;
    Mat3 operator*(const Mat3& o) const;
};

/// Symmetric 3x3 matrix stored by its six independent entries.
class SymMatrix3 {
public:
    double m11 = 0, m22 = 0, m33 = 0, m12 = 0, m13 = 0, m23 = 0;

    SymMatrix3() = default;
    SymMatrix3(double a11, double a22, double a33, double a12, double a13, double a23)
        : m11(a11), m22(a22), m33(a33), m12(a12), m13(a13), m23(a23) {}

    static SymMatrix3 diagonal(double d1, double d2, double d3) { return {d1, d2, d3, 0, 0, 0}; }
    static SymMatrix3 identity() { return diagonal(1, 1, 1); }
    /// Symmetric part of a dense matrix.
    static SymMatrix3 from_dense(const Mat3& m);

    double operator()(int i, int j) const;
    Mat3 dense() const;

    double trace() const { return m11 + m22 + m33; }
    double determinant() const;
    double max_abs() const;
    bool is_finite() const;

    SymMatrix3 operator*(double t) const;
    SymMatrix3 operator-() const { return *this * -1.0; }
    SymMatrix3 operator+(const SymMatrix3& o) const;
};

/// Ellipticity constants 0 < lambda <= Lambda of the Pucci pair.
class EllipticityParams {
public:
    /// Throws ParameterError unless 0 < lambda <= Lambda (both finite).
    static EllipticityParams from_bounds(double lambda, double Lambda);
    /// Lambda = omega * lambda.
    static EllipticityParams from_ratio(double omega, double lambda = 1.0);

    double lambda() const { return lambda_; }
    double Lambda() const { return Lambda_; }
    double omega() const { return omega_; }

private:
    EllipticityParams(double lambda, double Lambda)
        : lambda_(lambda), Lambda_(Lambda), omega_(Lambda / lambda) {}
    double lambda_;
    double Lambda_;
    double omega_;
};

/// Eigenvalues in nondecreasing order. Closed-form trigonometric solve with a
/// cyclic Jacobi fallback for nearly repeated roots. Throws InvalidInput on
/// non-finite entries.
std::array<double, 3> eigenvalues(const SymMatrix3& m);

struct EigenDecomposition {
    std::array<double, 3> values;   // nondecreasing
    std::array<Vec3, 3> vectors;    // vectors[k] pairs with values[k], orthonormal
};

/// Full decomposition by cyclic Jacobi rotations.
EigenDecomposition eigen_decompose(const SymMatrix3& m);

/// Eigenvalues with |e| <= tau * max(1, |M|) count as zero in the Pucci sums.
inline constexpr double kPucciZeroTau = 1e-12;

/// Lambda * (sum of positive eigenvalues) + lambda * (sum of negative ones).
double pucci_plus(const SymMatrix3& m, const EllipticityParams& p);
/// lambda * (sum of positive eigenvalues) + Lambda * (sum of negative ones).
double pucci_minus(const SymMatrix3& m, const EllipticityParams& p);

/// A^{-T} M A^{-1}: the Hessian of x -> u(A^{-1} x) given the Hessian M of u.
SymMatrix3 congruence(const Mat3& A, const SymMatrix3& m);

/// Sign of each sorted eigenvalue (-1, 0, +1) with |e| <= threshold mapped to 0.
std::array<int, 3> inertia(const SymMatrix3& m, double threshold);

}  // namespace pucci3d
