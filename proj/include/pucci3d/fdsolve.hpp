#pragma once

// Finite-difference estimate of the principal half-eigenvalue on a voxel
// mask: frozen-coefficient Picard iteration wrapped around inverse power.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pucci3d/geometry.hpp"
#include "pucci3d/report.hpp"

namespace pucci3d {

enum class NodeKind : std::uint8_t { Outside = 0, Interior = 1, Boundary = 2 };

/// Nodes sit at origin + (i, j, k) * h; x varies fastest.
struct GridField {
    double h = 0.0;
    std::array<int, 3> dims{};
    Vec3 origin{};
    std::vector<std::uint8_t> kind;  // NodeKind per node
    std::vector<double> values;      // empty for a bare mask

    std::size_t size() const { return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]; }
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(dims[0]) * (j + static_cast<std::size_t>(dims[1]) * k);
    }
    Vec3 position(int i, int j, int k) const {
        return {origin[0] + i * h, origin[1] + j * h, origin[2] + k * h};
    }
    std::size_t count(NodeKind k) const;
};

/// Mask of the physical domain scaled by `scale`. Requires
/// h <= scale * (pi/2) / 8, else ResolutionError. The grid is centred on the
/// origin and padded so that every inside node has all 26 neighbours.
GridField voxelize(const Domain& d, double h, double scale = 1.0);

/// Mask of an arbitrary closed set inside [-half_extent, half_extent].
GridField voxelize(const std::function<bool(const Vec3&)>& inside, const Vec3& half_extent, double h);

/// Closed cube [-half, half]^3.
GridField cube_mask(double half, double h);

struct EigenSolveResult {
    double mu = 0.0;
    int iterations = 0;
    std::vector<double> mu_history;
    std::vector<double> spread_history;
    std::vector<int> clip_iterations;  // outer iterations where positivity was restored
    std::string linear_solver;         // "sor" or "bicgstab" (last one used)
    double h = 0.0;
    std::size_t interior_nodes = 0;
    GridField field;                   // eigenfunction scaled to max 1

    json to_json() const;
};

struct SolveOptions {
    double tol = 1e-6;
    int maxit = 200;
    int max_sor_sweeps = 20000;
};

/// Throws NonConvergence (with the mu history) when maxit is exhausted and
/// SolverFailure when positivity keeps failing past the 10th iteration.
EigenSolveResult solve_eigen(const GridField& mask, const EllipticityParams& ep, const SolveOptions& opts);
EigenSolveResult solve_eigen(const GridField& mask, const EllipticityParams& ep, double tol, int maxit);

// Binary voxel files: "PVOX", kind byte (1 mask, 8 float64), 3 pad bytes,
// uint32 nx ny nz, float64 h, then one byte or one double per node, x fastest.
void write_mask(const std::string& path, const GridField& g);
void write_values(const std::string& path, const GridField& g);
/// Reads either flavour; a float file yields values and a kind array marking
/// positive nodes interior.
GridField read_voxels(const std::string& path);

}  // namespace pucci3d
