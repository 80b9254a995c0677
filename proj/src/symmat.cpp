#include "pucci3d/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pucci3d/error.hpp"

namespace pucci3d {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_finite(const SymMatrix3& m) {
    if (!m.is_finite()) throw InvalidInput("symmetric matrix has non-finite entries");
}

// Cyclic Jacobi on a dense symmetric copy; accumulates rotations into v.
void jacobi(std::array<std::array<double, 3>, 3>& a, std::array<std::array<double, 3>, 3>& v) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v[i][j] = (i == j) ? 1.0 : 0.0;

    for (int sweep = 0; sweep < 64; ++sweep) {
        const double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
        const double diag = std::abs(a[0][0]) + std::abs(a[1][1]) + std::abs(a[2][2]);
        if (off == 0.0 || off <= kEps * kEps * diag) break;

        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                const double apq = a[p][q];
                if (apq == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v[k][p];
                    const double vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
}

std::array<std::array<double, 3>, 3> to_rows(const SymMatrix3& m) {
    return {{{m.m11, m.m12, m.m13}, {m.m12, m.m22, m.m23}, {m.m13, m.m23, m.m33}}};
}

std::array<double, 3> jacobi_eigenvalues(const SymMatrix3& m) {
    auto a = to_rows(m);
    std::array<std::array<double, 3>, 3> v{};
    jacobi(a, v);
    std::array<double, 3> e{a[0][0], a[1][1], a[2][2]};
    std::sort(e.begin(), e.end());
    return e;
}

}  // namespace

// ---------------------------------------------------------------------------
// Mat3

Mat3 Mat3::identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
}

double Mat3::determinant() const {
    const auto& m = *this;
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

Mat3 Mat3::transposed() const {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
    return t;
}

Mat3 Mat3::inverse() const {
    const auto& m = *this;
    double scale = 0.0;
    for (double x : a) scale = std::max(scale, std::abs(x));
    const double det = determinant();
    if (!std::isfinite(det) || scale == 0.0 || std::abs(det) <= 1e-14 * scale * scale * scale)
        throw SingularMatrix("matrix is singular to working precision");

    Mat3 inv;
    inv(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / det;
    inv(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / det;
    inv(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / det;
    inv(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / det;
    inv(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / det;
    inv(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / det;
    inv(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / det;
    inv(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / det;
    inv(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / det;
    return inv;
}

Vec3 Mat3::apply(const Vec3& v) const {
    Vec3 r{};
    for (int i = 0; i < 3; ++i) r[i] = (*this)(i, 0) * v[0] + (*this)(i, 1) * v[1] + (*this)(i, 2) * v[2];
    return r;
}

Mat3 Mat3::operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r(i, j) = (*this)(i, 0) * o(0, j) + (*this)(i, 1) * o(1, j) + (*this)(i, 2) * o(2, j);
    return r;
}

// ---------------------------------------------------------------------------
// SymMatrix3

SymMatrix3 SymMatrix3::from_dense(const Mat3& m) {
    return {m(0, 0), m(1, 1), m(2, 2), 0.5 * (m(0, 1) + m(1, 0)), 0.5 * (m(0, 2) + m(2, 0)),
            0.5 * (m(1, 2) + m(2, 1))};
}

double SymMatrix3::operator()(int i, int j) const {
    if (i > j) std::swap(i, j);
    if (i == j) return i == 0 ? m11 : (i == 1 ? m22 : m33);
    if (i == 0) return j == 1 ? m12 : m13;
    return m23;
}

Mat3 SymMatrix3::dense() const {
    Mat3 d;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) d(i, j) = (*this)(i, j);
    return d;
}

double SymMatrix3::determinant() const { return dense().determinant(); }

double SymMatrix3::max_abs() const {
    return std::max({std::abs(m11), std::abs(m22), std::abs(m33), std::abs(m12), std::abs(m13),
                     std::abs(m23)});
}

bool SymMatrix3::is_finite() const {
    return std::isfinite(m11) && std::isfinite(m22) && std::isfinite(m33) && std::isfinite(m12) &&
           std::isfinite(m13) && std::isfinite(m23);
}

SymMatrix3 SymMatrix3::operator*(double t) const {
    return {m11 * t, m22 * t, m33 * t, m12 * t, m13 * t, m23 * t};
}

SymMatrix3 SymMatrix3::operator+(const SymMatrix3& o) const {
    return {m11 + o.m11, m22 + o.m22, m33 + o.m33, m12 + o.m12, m13 + o.m13, m23 + o.m23};
}

// ---------------------------------------------------------------------------
// EllipticityParams

EllipticityParams EllipticityParams::from_bounds(double lambda, double Lambda) {
    if (!std::isfinite(lambda) || !std::isfinite(Lambda))
        throw ParameterError("ellipticity constants must be finite");
    if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
    if (!(Lambda >= lambda)) throw ParameterError("Lambda must be >= lambda");
    return EllipticityParams(lambda, Lambda);
}

EllipticityParams EllipticityParams::from_ratio(double omega, double lambda) {
    if (!std::isfinite(omega) || !(omega >= 1.0)) throw ParameterError("omega must be >= 1");
    return from_bounds(lambda, omega * lambda);
}

// ---------------------------------------------------------------------------
// Spectra

std::array<double, 3> eigenvalues(const SymMatrix3& m) {
    require_finite(m);

    const double off = m.m12 * m.m12 + m.m13 * m.m13 + m.m23 * m.m23;
    if (off == 0.0) {
        std::array<double, 3> e{m.m11, m.m22, m.m33};
        std::sort(e.begin(), e.end());
        return e;
    }

    const double q = m.trace() / 3.0;
    const double d1 = m.m11 - q, d2 = m.m22 - q, d3 = m.m33 - q;
    const double p2 = (d1 * d1 + d2 * d2 + d3 * d3 + 2.0 * off) / 6.0;
    const double p = std::sqrt(p2);

    // B = (M - qI)/p; r = det(B)/2 lies in [-1, 1]; the cubic discriminant is
    // proportional to 1 - r^2.
    const SymMatrix3 b(d1 / p, d2 / p, d3 / p, m.m12 / p, m.m13 / p, m.m23 / p);
    const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
    if (1.0 - r * r <= 1e3 * kEps) return jacobi_eigenvalues(m);

    const double phi = std::acos(r) / 3.0;
    const double e3 = q + 2.0 * p * std::cos(phi);
    const double e1 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    std::array<double, 3> e{e1, e2, e3};
    std::sort(e.begin(), e.end());
    return e;
}

EigenDecomposition eigen_decompose(const SymMatrix3& m) {
    require_finite(m);
    auto a = to_rows(m);
    std::array<std::array<double, 3>, 3> v{};
    jacobi(a, v);

    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] < a[j][j]; });

    EigenDecomposition out{};
    for (int k = 0; k < 3; ++k) {
        const int c = order[k];
        out.values[k] = a[c][c];
        out.vectors[k] = {v[0][c], v[1][c], v[2][c]};
    }
    return out;
}

double pucci_plus(const SymMatrix3& m, const EllipticityParams& p) {
    const auto e = eigenvalues(m);
    const double thr = kPucciZeroTau * std::max(1.0, m.max_abs());
    double pos = 0.0, neg = 0.0;
    for (double v : e) {
        if (v > thr) pos += v;
        else if (v < -thr) neg += v;
    }
    return p.Lambda() * pos + p.lambda() * neg;
}

double pucci_minus(const SymMatrix3& m, const EllipticityParams& p) {
    const auto e = eigenvalues(m);
    const double thr = kPucciZeroTau * std::max(1.0, m.max_abs());
    double pos = 0.0, neg = 0.0;
    for (double v : e) {
        if (v > thr) pos += v;
        else if (v < -thr) neg += v;
    }
    return p.lambda() * pos + p.Lambda() * neg;
}

SymMatrix3 congruence(const Mat3& A, const SymMatrix3& m) {
    const Mat3 inv = A.inverse();
    const Mat3 r = inv.transposed() * m.dense() * inv;
    return SymMatrix3::from_dense(r);
}

std::array<int, 3> inertia(const SymMatrix3& m, double threshold) {
    const auto e = eigenvalues(m);
    std::array<int, 3> s{};
    for (int k = 0; k < 3; ++k) s[k] = e[k] > threshold ? 1 : (e[k] < -threshold ? -1 : 0);
    return s;
}

}  // namespace pucci3d
