#pragma once

// Command-line driver. Every output embeds the RunConfig that produced it,
// so `rerun` can regenerate it byte for byte.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pucci3d/report.hpp"

namespace pucci3d {

struct RunConfig {
    std::string command;
    std::optional<double> omega;
    std::optional<double> lambda;
    std::optional<double> Lambda;
    double gamma = 1.0;
    double a = 0.0;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 7;
    std::optional<double> h;
    double tol = 1e-6;
    int maxit = 200;
    std::string format = "json";
    // command specific
    std::vector<double> gamma_grid;
    std::vector<double> a_grid;
    std::string method = "quadrature";  // volume: quadrature | mc | both
    int dimension = 3;                  // nonsep
    double scale = 1.0;                 // solve
    bool cube = false;                  // solve on (-pi/2, pi/2)^3
    std::string mask;                   // solve on a voxel file
    std::string field_out;              // solve: eigenfunction voxel file

    /// Throws ParameterError unless exactly one of omega or (lambda, Lambda) is set.
    EllipticityParams ellipticity() const;

    /// Output paths and thread counts are not part of the record.
    json to_json() const;
    static RunConfig from_json(const json& j);
};

/// Runs one command; `out` is a directory for verify and a file otherwise
/// (empty means stdout). Returns the process exit code.
int execute(const RunConfig& cfg, const std::string& out, std::ostream& log);

/// Full argv front end.
int run_cli(int argc, char** argv);

}  // namespace pucci3d
