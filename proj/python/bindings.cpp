#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pucci3d/eigenfield.hpp"
#include "pucci3d/error.hpp"
#include "pucci3d/fdsolve.hpp"
#include "pucci3d/measure.hpp"
#include "pucci3d/verifier.hpp"

namespace py = pybind11;
using namespace pucci3d;

namespace {

EllipticityParams params(double omega, double lambda) { return EllipticityParams::from_ratio(omega, lambda); }

Domain domain(double omega, double gamma, double a, double lambda) {
    const EllipticityParams ep = params(omega, lambda);
    return Domain(ShapeParams::make(gamma, a, ep), ep);
}

SymMatrix3 sym(const std::array<std::array<double, 3>, 3>& m) {
    return {m[0][0], m[1][1], m[2][2], m[0][1], m[0][2], m[1][2]};
}

std::array<std::array<double, 3>, 3> dense(const SymMatrix3& m) {
    return {{{m.m11, m.m12, m.m13}, {m.m12, m.m22, m.m23}, {m.m13, m.m23, m.m33}}};
}

}  // namespace

PYBIND11_MODULE(_pucci3d, m) {
    // exception classes mirror the CLI exit-code families
    static py::exception<Error> base(m, "Error");
    static py::exception<Error> usage(m, "UsageError", base.ptr());
    static py::exception<Error> budget(m, "NumericalBudgetError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            if (e.exit_code() == ExitCode::numerical_budget) py::set_error(budget, e.what());
            else if (e.exit_code() == ExitCode::usage) py::set_error(usage, e.what());
            else py::set_error(base, e.what());
        }
    });

    m.def("eigenvalues", [](const std::array<std::array<double, 3>, 3>& a) { return eigenvalues(sym(a)); });
    m.def("pucci_plus", [](const std::array<std::array<double, 3>, 3>& a, double omega, double lambda) {
        return pucci_plus(sym(a), params(omega, lambda));
    }, py::arg("matrix"), py::arg("omega"), py::arg("lambda_") = 1.0);
    m.def("pucci_minus", [](const std::array<std::array<double, 3>, 3>& a, double omega, double lambda) {
        return pucci_minus(sym(a), params(omega, lambda));
    }, py::arg("matrix"), py::arg("omega"), py::arg("lambda_") = 1.0);

    m.def("admissible_gamma", [](double omega) { return admissible_gamma(params(omega, 1.0)); });
    m.def("contains", [](const Vec3& x, double omega, double gamma, double a) {
        return domain(omega, gamma, a, 1.0).contains(x);
    }, py::arg("point"), py::arg("omega"), py::arg("gamma") = 1.0, py::arg("a") = 0.0);
    m.def("classify", [](const Vec3& x, double omega, double gamma, double a) -> py::object {
        const auto loc = domain(omega, gamma, a, 1.0).classify(x);
        if (!loc) return py::none();
        return py::make_tuple(std::string(to_string(loc->patch)), loc->octant);
    }, py::arg("point"), py::arg("omega"), py::arg("gamma") = 1.0, py::arg("a") = 0.0);

    m.def("eigenfield", [](const Vec3& x, double omega, double gamma, double a, double lambda) {
        const Eigenfield f(domain(omega, gamma, a, lambda));
        const PatchEval e = a == 0.0 ? f.eval(x) : f.eval_sheared(x);
        py::dict d;
        d["patch"] = std::string(to_string(e.location.patch));
        d["value"] = e.value;
        d["gradient"] = e.gradient;
        d["hessian"] = dense(e.hessian);
        return d;
    }, py::arg("point"), py::arg("omega"), py::arg("gamma") = 1.0, py::arg("a") = 0.0, py::arg("lambda_") = 1.0);

    m.def("block_spectrum", [](double p, double q, double r, double a) {
        const BlockSpectrum b = block_spectrum(p, q, r, a);
        return py::make_tuple(b.mu_plus, b.mu_minus, b.mu3);
    });
    m.def("separable_residual", [](double x, int n, double lambda, double Lambda) {
        const SeparableResidual r = separable_candidate_residual(x, n, EllipticityParams::from_bounds(lambda, Lambda));
        return py::make_tuple(r.residual, r.closed_form);
    });

    m.def("_verify", [](const std::string& suite, double omega, double gamma, double a, std::size_t n,
                        std::uint64_t seed) {
        py::gil_scoped_release nogil;
        const Domain d = domain(omega, gamma, a, 1.0);
        VerificationReport r;
        if (suite == "residual") r = residual_suite(d, n, seed);
        else if (suite == "c1") r = c1_suite(d, n, seed);
        else if (suite == "boundary") r = boundary_suite(d, n, seed);
        else if (suite == "shear_bound") r = shear_bound_suite(d, n, seed);
        else if (suite == "block_identity") r = block_identity_suite(n, seed);
        else throw InvalidInput("unknown suite '" + suite + "'");
        return r.to_json().dump();
    });

    m.def("_volume_quadrature", [](double omega, double gamma, double rel_tol) {
        py::gil_scoped_release nogil;
        return volume_quadrature(domain(omega, gamma, 0.0, 1.0), rel_tol).to_json().dump();
    });
    m.def("_volume_mc", [](double omega, double gamma, double a, std::size_t n, std::uint64_t seed) {
        py::gil_scoped_release nogil;
        return volume_mc(domain(omega, gamma, a, 1.0), n, seed).to_json().dump();
    });
    m.def("volume_derivative", [](double gamma, double omega, double h) {
        return volume_derivative(gamma, params(omega, 1.0), h);
    }, py::arg("gamma"), py::arg("omega"), py::arg("h") = 1e-3);
    m.def("normalized_functional", [](double V, double a, double omega, double lambda) {
        return normalized_functional(V, a, params(omega, lambda));
    }, py::arg("V"), py::arg("a"), py::arg("omega"), py::arg("lambda_") = 1.0);
    m.def("_kernel_integrals", [](double gamma, double omega) {
        return kernel_integrals(gamma, params(omega, 1.0)).to_json().dump();
    });

    m.def("_solve", [](double omega, double h, bool cube, double gamma, double a, double scale, double tol,
                       int maxit) {
        py::gil_scoped_release nogil;
        const EllipticityParams ep = params(omega, 1.0);
        const GridField mask = cube ? cube_mask(scale * kAlpha, h)
                                    : voxelize(Domain(ShapeParams::make(gamma, a, ep), ep), h, scale);
        return solve_eigen(mask, ep, tol, maxit).to_json().dump();
    });
}
