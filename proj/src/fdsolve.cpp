#include "pucci3d/fdsolve.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "pucci3d/error.hpp"
#include "pucci3d/parallel.hpp"

namespace pucci3d {

std::size_t GridField::count(NodeKind k) const {
    return static_cast<std::size_t>(std::count(kind.begin(), kind.end(), static_cast<std::uint8_t>(k)));
}

// ---------------------------------------------------------------------------
// Voxelization

namespace {

GridField classify_nodes(const std::function<bool(const Vec3&)>& inside, const std::array<int, 3>& half_nodes,
                         double h) {
    GridField g;
    g.h = h;
    for (int a = 0; a < 3; ++a) {
        g.dims[a] = 2 * half_nodes[a] + 1;
        g.origin[a] = -half_nodes[a] * h;
    }
    const std::size_t n = g.size();
    std::vector<std::uint8_t> in(n, 0);
    const int nz = g.dims[2];
    for_each_chunk(static_cast<std::size_t>(nz), 1, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k)
            for (int j = 0; j < g.dims[1]; ++j)
                for (int i = 0; i < g.dims[0]; ++i) {
                    // exact multiples of h keep the grid symmetric under sign flips
                    const Vec3 X{(i - half_nodes[0]) * h, (j - half_nodes[1]) * h,
                                 (static_cast<int>(k) - half_nodes[2]) * h};
                    in[g.index(i, j, static_cast<int>(k))] = inside(X) ? 1 : 0;
                }
    });

    g.kind.assign(n, static_cast<std::uint8_t>(NodeKind::Outside));
    for (int k = 0; k < g.dims[2]; ++k)
        for (int j = 0; j < g.dims[1]; ++j)
            for (int i = 0; i < g.dims[0]; ++i) {
                const std::size_t id = g.index(i, j, k);
                if (!in[id]) continue;
                if (i == 0 || j == 0 || k == 0 || i + 1 == g.dims[0] || j + 1 == g.dims[1] || k + 1 == g.dims[2])
                    throw InternalError("domain touches the edge of the voxel box");
                const bool all = in[g.index(i - 1, j, k)] && in[g.index(i + 1, j, k)] && in[g.index(i, j - 1, k)] &&
                                 in[g.index(i, j + 1, k)] && in[g.index(i, j, k - 1)] && in[g.index(i, j, k + 1)];
                g.kind[id] = static_cast<std::uint8_t>(all ? NodeKind::Interior : NodeKind::Boundary);
            }
    return g;
}

}  // namespace

GridField voxelize(const std::function<bool(const Vec3&)>& inside, const Vec3& half_extent, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("grid spacing must be positive");
    std::array<int, 3> half{};
    for (int a = 0; a < 3; ++a) half[a] = static_cast<int>(std::ceil(half_extent[a] / h)) + 1;
    return classify_nodes(inside, half, h);
}

GridField voxelize(const Domain& d, double h, double scale) {
    if (!(scale > 0.0)) throw ParameterError("scale must be positive");
    if (!(h > 0.0)) throw ParameterError("grid spacing must be positive");
    const double limit = scale * kAlpha / 8.0;
    if (h > limit)
        throw ResolutionError("h=" + std::to_string(h) + " too coarse, need h <= " + std::to_string(limit));
    const Box b = d.physical_box();
    Vec3 half{};
    for (int a = 0; a < 3; ++a) half[a] = scale * std::max(std::abs(b.lo[a]), std::abs(b.hi[a]));
    return voxelize(
        [&](const Vec3& X) { return d.contains({X[0] / scale, X[1] / scale, X[2] / scale}); }, half, h);
}

GridField cube_mask(double half, double h) {
    const double edge = half * (1.0 + 1e-12);
    return voxelize(
        [&](const Vec3& X) { return std::abs(X[0]) <= edge && std::abs(X[1]) <= edge && std::abs(X[2]) <= edge; },
        {half, half, half}, h);
}

// ---------------------------------------------------------------------------
// Solver

namespace {

// diagonal first, then six axis and twelve edge neighbours
constexpr int kStencil = 19;

struct Offsets {
    std::array<std::array<int, 3>, kStencil> d{};
    Offsets() {
        int n = 1;
        for (int a = 0; a < 3; ++a)
            for (int s : {-1, 1}) {
                d[n] = {0, 0, 0};
                d[n][a] = s;
                ++n;
            }
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                for (int sa : {-1, 1})
                    for (int sb : {-1, 1}) {
                        d[n] = {0, 0, 0};
                        d[n][a] = sa;
                        d[n][b] = sb;
                        ++n;
                    }
    }
};
const Offsets kOff;

// index of the stencil slot for an axis step / an edge step
int axis_slot(int a, int s) { return 1 + 2 * a + (s > 0 ? 1 : 0); }
int edge_slot(int a, int b, int sa, int sb) {
    const int pair = (a == 0 && b == 1) ? 0 : (a == 0 ? 1 : 2);
    return 7 + 4 * pair + 2 * (sa > 0 ? 1 : 0) + (sb > 0 ? 1 : 0);
}

struct System {
    std::size_t m = 0;                               // unknowns
    std::vector<std::size_t> node;                   // unknown -> grid node
    std::vector<std::array<std::int64_t, kStencil>> nb;  // neighbour unknowns, -1 when pinned to 0
    std::vector<std::uint8_t> deep;                  // 3x3x3 block fully interior
    std::vector<std::array<double, kStencil>> coef;  // rows of -tr(A D^2_h)
};

System build_system(const GridField& g) {
    System s;
    std::vector<std::int64_t> unknown(g.size(), -1);
    for (std::size_t id = 0; id < g.size(); ++id)
        if (g.kind[id] == static_cast<std::uint8_t>(NodeKind::Interior)) {
            unknown[id] = static_cast<std::int64_t>(s.m++);
            s.node.push_back(id);
        }
    if (s.m == 0) throw ParameterError("mask has no interior nodes");
    s.nb.resize(s.m);
    s.deep.assign(s.m, 1);
    s.coef.resize(s.m);
    const int nx = g.dims[0], ny = g.dims[1];
    for (std::size_t u = 0; u < s.m; ++u) {
        const std::size_t id = s.node[u];
        const int i = static_cast<int>(id % nx);
        const int j = static_cast<int>((id / nx) % ny);
        const int k = static_cast<int>(id / (static_cast<std::size_t>(nx) * ny));
        for (int t = 0; t < kStencil; ++t)
            s.nb[u][t] = unknown[g.index(i + kOff.d[t][0], j + kOff.d[t][1], k + kOff.d[t][2])];
        for (int dz = -1; dz <= 1 && s.deep[u]; ++dz)
            for (int dy = -1; dy <= 1 && s.deep[u]; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (unknown[g.index(i + dx, j + dy, k + dz)] < 0) {
                        s.deep[u] = 0;
                        break;
                    }
    }
    return s;
}

double at(const std::vector<double>& v, std::int64_t idx) { return idx < 0 ? 0.0 : v[static_cast<std::size_t>(idx)]; }

SymMatrix3 hessian_at(const System& s, const std::vector<double>& v, std::size_t u, double h2) {
    const auto& nb = s.nb[u];
    const double c = v[u];
    auto second = [&](int a) { return (at(v, nb[axis_slot(a, 1)]) - 2.0 * c + at(v, nb[axis_slot(a, -1)])) / h2; };
    auto cross = [&](int a, int b) {
        return (at(v, nb[edge_slot(a, b, 1, 1)]) - at(v, nb[edge_slot(a, b, 1, -1)]) -
                at(v, nb[edge_slot(a, b, -1, 1)]) + at(v, nb[edge_slot(a, b, -1, -1)])) /
               (4.0 * h2);
    };
    return {second(0), second(1), second(2), cross(0, 1), cross(0, 2), cross(1, 2)};
}

// A = lambda I + (Lambda - lambda) * projector onto eigenvectors with e >= 0
SymMatrix3 extremal_coefficients(const SymMatrix3& H, const EllipticityParams& ep) {
    const double lam = ep.lambda(), gap = ep.Lambda() - ep.lambda();
    SymMatrix3 A = SymMatrix3::identity() * lam;
    if (gap == 0.0) return A;
    const EigenDecomposition ed = eigen_decompose(H);
    for (int k = 0; k < 3; ++k) {
        if (ed.values[k] < 0.0) continue;
        const Vec3& w = ed.vectors[k];
        A.m11 += gap * w[0] * w[0];
        A.m22 += gap * w[1] * w[1];
        A.m33 += gap * w[2] * w[2];
        A.m12 += gap * w[0] * w[1];
        A.m13 += gap * w[0] * w[2];
        A.m23 += gap * w[1] * w[2];
    }
    return A;
}

void assemble(System& s, const std::vector<double>& v, const EllipticityParams& ep, double h) {
    const double h2 = h * h;
    for_each_chunk(s.m, 2048, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t u = b; u < e; ++u) {
            const SymMatrix3 A = extremal_coefficients(hessian_at(s, v, u, h2), ep);
            auto& row = s.coef[u];
            row.fill(0.0);
            row[0] = 2.0 * A.trace() / h2;
            for (int a = 0; a < 3; ++a) row[axis_slot(a, 1)] = row[axis_slot(a, -1)] = -A(a, a) / h2;
            for (int a = 0; a < 3; ++a)
                for (int bb = a + 1; bb < 3; ++bb) {
                    const double c = A(a, bb) / (2.0 * h2);
                    row[edge_slot(a, bb, 1, 1)] = -c;
                    row[edge_slot(a, bb, -1, -1)] = -c;
                    row[edge_slot(a, bb, 1, -1)] = c;
                    row[edge_slot(a, bb, -1, 1)] = c;
                }
        }
    });
}

double apply_row(const System& s, const std::vector<double>& w, std::size_t u) {
    double acc = s.coef[u][0] * w[u];
    for (int t = 1; t < kStencil; ++t) acc += s.coef[u][t] * at(w, s.nb[u][t]);
    return acc;
}

double residual_norm(const System& s, const std::vector<double>& w, const std::vector<double>& b) {
    std::vector<double> part((s.m + 4095) / 4096, 0.0);
    for_each_chunk(s.m, 4096, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t u = lo; u < hi; ++u) {
            const double r = b[u] - apply_row(s, w, u);
            acc += r * r;
        }
        part[c] = acc;
    });
    double sum = 0.0;
    for (double p : part) sum += p;
    return std::sqrt(sum);
}

double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

// Successive over-relaxation; false when it diverges or stalls.
bool sor(const System& s, std::vector<double>& w, const std::vector<double>& b, double rel_tol, double relax,
         int max_sweeps) {
    const double bn = norm2(b);
    if (bn == 0.0) {
        std::fill(w.begin(), w.end(), 0.0);
        return true;
    }
    double r0 = residual_norm(s, w, b);
    double best = r0;
    int since_best = 0;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        for (std::size_t u = 0; u < s.m; ++u) {
            double off = 0.0;
            for (int t = 1; t < kStencil; ++t) off += s.coef[u][t] * at(w, s.nb[u][t]);
            const double gs = (b[u] - off) / s.coef[u][0];
            w[u] += relax * (gs - w[u]);
        }
        if (sweep % 10 != 0) continue;
        const double r = residual_norm(s, w, b);
        if (!std::isfinite(r) || r > 1e3 * std::max(r0, bn)) return false;
        if (r <= rel_tol * bn) return true;
        if (r < 0.99 * best) {
            best = r;
            since_best = 0;
        } else if (++since_best > 50) {
            return false;
        }
    }
    return false;
}

bool bicgstab(const System& s, std::vector<double>& w, const std::vector<double>& b, double rel_tol) {
    using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(s.m * kStencil);
    for (std::size_t u = 0; u < s.m; ++u) {
        trip.emplace_back(static_cast<int>(u), static_cast<int>(u), s.coef[u][0]);
        for (int t = 1; t < kStencil; ++t)
            if (s.nb[u][t] >= 0 && s.coef[u][t] != 0.0)
                trip.emplace_back(static_cast<int>(u), static_cast<int>(s.nb[u][t]), s.coef[u][t]);
    }
    SpMat K(static_cast<Eigen::Index>(s.m), static_cast<Eigen::Index>(s.m));
    K.setFromTriplets(trip.begin(), trip.end());
    Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> solver;
    solver.setTolerance(rel_tol);
    solver.setMaxIterations(static_cast<Eigen::Index>(std::max<std::size_t>(1000, s.m / 10)));
    solver.compute(K);
    if (solver.info() != Eigen::Success) return false;
    const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(s.m));
    Eigen::Map<Eigen::VectorXd> x(w.data(), static_cast<Eigen::Index>(s.m));
    const Eigen::VectorXd guess = x;
    x = solver.solveWithGuess(rhs, guess);
    return solver.info() == Eigen::Success && residual_norm(s, w, b) <= 10.0 * rel_tol * norm2(b);
}

struct RatioStats {
    double median;
    double spread;  // (max - min) over deep nodes
};

RatioStats ratio_stats(const System& s, const std::vector<double>& v, const EllipticityParams& ep, double h) {
    const double h2 = h * h;
    std::vector<double> ratio(s.m, std::numeric_limits<double>::quiet_NaN());
    for_each_chunk(s.m, 2048, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t u = b; u < e; ++u)
            if (v[u] > 0.0) ratio[u] = -pucci_plus(hessian_at(s, v, u, h2), ep) / v[u];
    });
    std::vector<double> all;
    all.reserve(s.m);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t u = 0; u < s.m; ++u) {
        if (std::isnan(ratio[u])) continue;
        all.push_back(ratio[u]);
        if (s.deep[u]) {
            lo = std::min(lo, ratio[u]);
            hi = std::max(hi, ratio[u]);
        }
    }
    if (all.empty()) throw SolverFailure("iterate has no positive node");
    const auto mid = all.begin() + static_cast<std::ptrdiff_t>(all.size() / 2);
    std::nth_element(all.begin(), mid, all.end());
    double med = *mid;
    if (all.size() % 2 == 0) med = 0.5 * (med + *std::max_element(all.begin(), mid));
    return {med, hi >= lo ? hi - lo : 0.0};
}

// Zero out non-positive entries, then replace them by the mean of their six
// axis neighbours. Returns whether anything was clipped.
bool restore_positivity(const System& s, std::vector<double>& w) {
    std::vector<std::size_t> bad;
    for (std::size_t u = 0; u < s.m; ++u)
        if (!(w[u] > 0.0)) {
            w[u] = 0.0;
            bad.push_back(u);
        }
    if (bad.empty()) return false;
    std::vector<double> fixed(bad.size());
    for (std::size_t k = 0; k < bad.size(); ++k) {
        double acc = 0.0;
        for (int t = 1; t <= 6; ++t) acc += at(w, s.nb[bad[k]][t]);
        fixed[k] = acc / 6.0;
    }
    for (std::size_t k = 0; k < bad.size(); ++k) w[bad[k]] = fixed[k];
    return true;
}

void scale_to_max(std::vector<double>& v) {
    const double mx = *std::max_element(v.begin(), v.end());
    if (!(mx > 0.0)) throw SolverFailure("iterate lost positivity everywhere");
    for (double& x : v) x /= mx;
}

}  // namespace

EigenSolveResult solve_eigen(const GridField& mask, const EllipticityParams& ep, double tol, int maxit) {
    SolveOptions o;
    o.tol = tol;
    o.maxit = maxit;
    return solve_eigen(mask, ep, o);
}

EigenSolveResult solve_eigen(const GridField& mask, const EllipticityParams& ep, const SolveOptions& opts) {
    if (!(opts.tol > 0.0) || opts.maxit < 1) throw ParameterError("solver needs tol > 0 and maxit >= 1");
    if (mask.kind.size() != mask.size()) throw InvalidInput("mask kind array does not match its dimensions");
    System s = build_system(mask);
    const double h = mask.h;

    // product-of-cosines bump over the grid box
    std::vector<double> v(s.m);
    for (std::size_t u = 0; u < s.m; ++u) {
        const std::size_t id = s.node[u];
        const int i = static_cast<int>(id % mask.dims[0]);
        const int j = static_cast<int>((id / mask.dims[0]) % mask.dims[1]);
        const int k = static_cast<int>(id / (static_cast<std::size_t>(mask.dims[0]) * mask.dims[1]));
        const Vec3 X = mask.position(i, j, k);
        double val = 1.0;
        for (int a = 0; a < 3; ++a) {
            const double half = 0.5 * (mask.dims[a] - 1) * h;
            val *= std::cos(std::numbers::pi * (X[a] - mask.origin[a] - half) / (2.0 * half));
        }
        v[u] = val;
    }
    scale_to_max(v);

    const int longest = std::max({mask.dims[0], mask.dims[1], mask.dims[2]});
    const double relax = 2.0 / (1.0 + std::sin(std::numbers::pi / longest));
    const double lin_tol = opts.tol / 10.0;

    EigenSolveResult res;
    res.h = h;
    res.interior_nodes = s.m;
    res.linear_solver = "sor";
    double mu = ratio_stats(s, v, ep, h).median;
    std::vector<double> w(s.m);
    for (std::size_t u = 0; u < s.m; ++u) w[u] = v[u] / mu;
    bool sor_ok = true;

    for (int it = 1; it <= opts.maxit; ++it) {
        assemble(s, v, ep, h);
        bool solved = false;
        if (sor_ok) {
            std::vector<double> trial = w;
            solved = sor(s, trial, v, lin_tol, relax, opts.max_sor_sweeps);
            if (solved) w.swap(trial);
            else sor_ok = false;  // stay on the Krylov solver from here on
        }
        if (!solved) {
            res.linear_solver = "bicgstab";
            if (!bicgstab(s, w, v, lin_tol)) throw SolverFailure("linear solve failed at iteration " + std::to_string(it));
        }

        if (restore_positivity(s, w)) {
            res.clip_iterations.push_back(it);
            if (it > 10) throw SolverFailure("positivity still failing at iteration " + std::to_string(it));
        }
        v = w;
        scale_to_max(v);
        const RatioStats st = ratio_stats(s, v, ep, h);
        const double change = std::abs(st.median - mu);
        mu = st.median;
        res.mu_history.push_back(mu);
        res.spread_history.push_back(st.spread / mu);
        res.iterations = it;
        if (change < opts.tol * mu && st.spread < 10.0 * opts.tol * mu) {
            res.mu = mu;
            res.field = mask;
            res.field.values.assign(mask.size(), 0.0);
            for (std::size_t u = 0; u < s.m; ++u) res.field.values[s.node[u]] = v[u];
            return res;
        }
        // warm start for the next solve: w ~ v / mu
        for (std::size_t u = 0; u < s.m; ++u) w[u] = v[u] / mu;
    }
    throw NonConvergence("eigen iteration did not converge in " + std::to_string(opts.maxit) + " iterations",
                         res.mu_history);
}

json EigenSolveResult::to_json() const {
    json j;
    j["schema"] = kSchemaVersion;
    j["mu"] = mu;
    j["iterations"] = iterations;
    j["h"] = h;
    j["interior_nodes"] = interior_nodes;
    j["dims"] = field.dims;
    j["linear_solver"] = linear_solver;
    j["mu_history"] = mu_history;
    j["spread_history"] = spread_history;
    j["clip_iterations"] = clip_iterations;
    return j;
}

// ---------------------------------------------------------------------------
// Voxel files

namespace {

constexpr char kMagic[4] = {'P', 'V', 'O', 'X'};

void write_header(std::ofstream& f, std::uint8_t flavour, const GridField& g) {
    f.write(kMagic, 4);
    const std::uint8_t pad[4] = {flavour, 0, 0, 0};
    f.write(reinterpret_cast<const char*>(pad), 4);
    for (int a = 0; a < 3; ++a) {
        const auto d = static_cast<std::uint32_t>(g.dims[a]);
        f.write(reinterpret_cast<const char*>(&d), sizeof d);
    }
    f.write(reinterpret_cast<const char*>(&g.h), sizeof g.h);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open " + path + " for writing");
    return f;
}

}  // namespace

void write_mask(const std::string& path, const GridField& g) {
    if (g.kind.size() != g.size()) throw InvalidInput("mask kind array does not match its dimensions");
    auto f = open_out(path);
    write_header(f, 1, g);
    f.write(reinterpret_cast<const char*>(g.kind.data()), static_cast<std::streamsize>(g.kind.size()));
    if (!f) throw InvalidInput("short write to " + path);
}

void write_values(const std::string& path, const GridField& g) {
    if (g.values.size() != g.size()) throw InvalidInput("field has no values to write");
    auto f = open_out(path);
    write_header(f, 8, g);
    f.write(reinterpret_cast<const char*>(g.values.data()), static_cast<std::streamsize>(g.values.size() * sizeof(double)));
    if (!f) throw InvalidInput("short write to " + path);
}

GridField read_voxels(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open " + path);
    char magic[4];
    std::uint8_t pad[4];
    std::uint32_t dims[3];
    GridField g;
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(pad), 4);
    f.read(reinterpret_cast<char*>(dims), sizeof dims);
    f.read(reinterpret_cast<char*>(&g.h), sizeof g.h);
    if (!f || std::memcmp(magic, kMagic, 4) != 0) throw InvalidInput(path + " is not a voxel file");
    if (!(g.h > 0.0)) throw InvalidInput(path + ": non-positive spacing");
    for (int a = 0; a < 3; ++a) {
        if (dims[a] == 0 || dims[a] > 100000) throw InvalidInput(path + ": bad dimensions");
        g.dims[a] = static_cast<int>(dims[a]);
        g.origin[a] = -0.5 * (g.dims[a] - 1) * g.h;
    }
    const std::size_t n = g.size();
    if (pad[0] == 1) {
        g.kind.resize(n);
        f.read(reinterpret_cast<char*>(g.kind.data()), static_cast<std::streamsize>(n));
        for (std::uint8_t k : g.kind)
            if (k > 2) throw InvalidInput(path + ": node kind out of range");
    } else if (pad[0] == 8) {
        g.values.resize(n);
        f.read(reinterpret_cast<char*>(g.values.data()), static_cast<std::streamsize>(n * sizeof(double)));
        g.kind.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            g.kind[i] = static_cast<std::uint8_t>(g.values[i] > 0.0 ? NodeKind::Interior : NodeKind::Outside);
    } else {
        throw InvalidInput(path + ": unknown voxel flavour");
    }
    if (!f) throw InvalidInput(path + ": truncated");
    return g;
}

}  // namespace pucci3d
