#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pucci3d {

/// Process exit codes shared by the CLI and the Python bindings.
enum class ExitCode : int {
    ok = 0,
    verified_failure = 1,
    usage = 2,
    numerical_budget = 3,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept { return ExitCode::usage; }
};

/// Non-finite or otherwise malformed numeric input.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Parameters outside their admissible range (gamma, a, h, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

/// Point outside the domain where a field evaluation was requested.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Grid spacing too coarse to resolve the domain.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// Quadrature did not reach its tolerance; carries the best estimate.
class QuadratureBudget : public Error {
public:
    QuadratureBudget(const std::string& what, double estimate, double error_estimate)
        : Error(what), estimate_(estimate), error_estimate_(error_estimate) {}
    ExitCode exit_code() const noexcept override { return ExitCode::numerical_budget; }
    double estimate() const noexcept { return estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double estimate_;
    double error_estimate_;
};

/// Eigen-solver ran out of iterations; carries the mu history for diagnosis.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}
    ExitCode exit_code() const noexcept override { return ExitCode::numerical_budget; }
    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

class SolverFailure : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::numerical_budget; }
};

/// Invariant broken inside the library (should be unreachable).
class InternalError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::verified_failure; }
};

}  // namespace pucci3d
