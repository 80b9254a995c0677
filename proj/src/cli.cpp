#include "pucci3d/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "pucci3d/eigenfield.hpp"
#include "pucci3d/error.hpp"
#include "pucci3d/fdsolve.hpp"
#include "pucci3d/measure.hpp"
#include "pucci3d/parallel.hpp"
#include "pucci3d/verifier.hpp"

namespace fs = std::filesystem;

namespace pucci3d {

// ---------------------------------------------------------------------------
// RunConfig

EllipticityParams RunConfig::ellipticity() const {
    const bool by_ratio = omega.has_value();
    const bool by_bounds = lambda.has_value() || Lambda.has_value();
    if (by_ratio == by_bounds)
        throw ParameterError("give exactly one of --omega or --lambda/--Lambda");
    if (by_ratio) return EllipticityParams::from_ratio(*omega);
    if (!lambda || !Lambda) throw ParameterError("--lambda and --Lambda must be given together");
    return EllipticityParams::from_bounds(*lambda, *Lambda);
}

json RunConfig::to_json() const {
    json j;
    j["schema"] = kSchemaVersion;
    j["command"] = command;
    j["omega"] = omega ? json(*omega) : json(nullptr);
    j["lambda"] = lambda ? json(*lambda) : json(nullptr);
    j["Lambda"] = Lambda ? json(*Lambda) : json(nullptr);
    // derived values, echoed for provenance
    try {
        const EllipticityParams ep = ellipticity();
        j["derived"] = {{"lambda", ep.lambda()}, {"Lambda", ep.Lambda()}, {"omega", ep.omega()}};
    } catch (const Error&) {
        j["derived"] = nullptr;
    }
    j["gamma"] = gamma;
    j["a"] = a;
    j["samples"] = samples;
    j["seed"] = seed;
    j["h"] = h ? json(*h) : json(nullptr);
    j["tol"] = tol;
    j["maxit"] = maxit;
    j["format"] = format;
    j["gamma_grid"] = gamma_grid;
    j["a_grid"] = a_grid;
    j["method"] = method;
    j["dimension"] = dimension;
    j["scale"] = scale;
    j["cube"] = cube;
    j["mask"] = mask;
    return j;
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object() || j.value("schema", 0) != kSchemaVersion)
        throw InvalidInput("not a schema-1 run configuration");
    auto opt = [&](const char* key) -> std::optional<double> {
        if (!j.contains(key) || j[key].is_null()) return std::nullopt;
        return j[key].get<double>();
    };
    RunConfig c;
    c.command = j.at("command").get<std::string>();
    c.omega = opt("omega");
    c.lambda = opt("lambda");
    c.Lambda = opt("Lambda");
    c.gamma = j.at("gamma").get<double>();
    c.a = j.at("a").get<double>();
    c.samples = j.at("samples").get<std::uint64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.h = opt("h");
    c.tol = j.at("tol").get<double>();
    c.maxit = j.at("maxit").get<int>();
    c.format = j.at("format").get<std::string>();
    c.gamma_grid = j.at("gamma_grid").get<std::vector<double>>();
    c.a_grid = j.at("a_grid").get<std::vector<double>>();
    c.method = j.at("method").get<std::string>();
    c.dimension = j.at("dimension").get<int>();
    c.scale = j.at("scale").get<double>();
    c.cube = j.at("cube").get<bool>();
    c.mask = j.at("mask").get<std::string>();
    return c;
}

// ---------------------------------------------------------------------------
// Output helpers

namespace {

constexpr double kPi = std::numbers::pi;

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write " + path);
    f << text;
    if (!f) throw InvalidInput("short write to " + path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    // shortest text that reads back to the same double
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int code(ExitCode c) { return static_cast<int>(c); }

// ---------------------------------------------------------------------------

int cmd_verify(const RunConfig& cfg, const std::string& out, std::ostream& log) {
    const EllipticityParams ep = cfg.ellipticity();
    const Domain d(ShapeParams::make(cfg.gamma, cfg.a, ep), ep);
    const std::size_t n = cfg.samples;

    std::vector<VerificationReport> reports;
    reports.push_back(residual_suite(d, n, cfg.seed));
    reports.push_back(c1_suite(d, n, cfg.seed));
    reports.push_back(boundary_suite(d, n, cfg.seed));
    reports.push_back(shear_bound_suite(d, n, cfg.seed));
    reports.push_back(block_identity_suite(n, cfg.seed));

    bool all = true;
    json combined = json::array();
    if (!out.empty()) fs::create_directories(out);
    for (const auto& r : reports) {
        json j = r.to_json();
        j["config"] = cfg.to_json();
        if (out.empty()) combined.push_back(j);
        else emit((fs::path(out) / (r.suite + ".json")).string(), dump(j));
        log << r.suite << ": " << (r.pass ? "pass" : "FAIL") << "  " << r.statistic_name << "=" << r.statistic
            << "  tolerance=" << r.tolerance << "\n";
        all = all && r.pass;
    }
    if (out.empty()) emit("", dump(combined));
    return code(all ? ExitCode::ok : ExitCode::verified_failure);
}

struct ScanRow {
    double gamma, a, V, V_err, Vprime, N;
    std::string method;
};

int cmd_scan(const RunConfig& cfg, const std::string& out, std::ostream& log) {
    const EllipticityParams ep = cfg.ellipticity();
    const std::vector<double> gammas = cfg.gamma_grid.empty() ? std::vector<double>{cfg.gamma} : cfg.gamma_grid;
    const std::vector<double> as = cfg.a_grid.empty() ? std::vector<double>{cfg.a} : cfg.a_grid;
    const auto [glo, ghi] = admissible_gamma(ep);
    constexpr double kStep = 1e-3;

    std::vector<ScanRow> rows;
    for (double g : gammas) {
        const ShapeParams flat = ShapeParams::make(g, 0.0, ep);
        double V0, err0;
        std::string method = "quadrature";
        try {
            const VolumeReport q = volume_quadrature(Domain(flat, ep));
            V0 = q.V;
            err0 = q.error;
        } catch (const QuadratureBudget& e) {
            V0 = e.estimate();
            err0 = e.error_estimate();
            method = "quadrature-budget";
        }
        double dV0 = std::numeric_limits<double>::quiet_NaN();
        if (g - kStep >= glo && g + kStep <= ghi) {
            try {
                dV0 = volume_derivative(g, ep, kStep);
            } catch (const QuadratureBudget&) {
                method = "quadrature-budget";
            }
        }
        for (double a : as) {
            const ShapeParams sp = ShapeParams::make(g, a, ep);
            const double det = sp.det_shear();
            rows.push_back({g, a, det * V0, det * err0, det * dV0, normalized_functional(V0, a, ep), method});
        }
    }

    // minimizer and the grid point nearest (1, 0)
    std::size_t best = 0;
    bool tie = false;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].N < rows[best].N) {
            best = i;
            tie = false;
        } else if (rows[i].N == rows[best].N) {
            tie = true;
        }
    }
    auto nearest = [](const std::vector<double>& grid, double target) {
        double b = grid.front();
        for (double v : grid)
            if (std::abs(v - target) < std::abs(b - target)) b = v;
        return b;
    };
    const double g_star = nearest(gammas, 1.0), a_star = nearest(as, 0.0);
    const bool ok = !tie && rows[best].gamma == g_star && rows[best].a == a_star;
    log << "minimum N=" << rows[best].N << " at gamma=" << rows[best].gamma << ", a=" << rows[best].a
        << (ok ? "" : "  (expected the grid point nearest gamma=1, a=0)") << "\n";

    if (cfg.format == "csv") {
        std::ostringstream s;
        s << "# config: " << cfg.to_json().dump() << "\n";
        s << "omega,gamma,a,V,V_err,Vprime,N,method,seed\n";
        for (const auto& r : rows)
            s << csv_number(ep.omega()) << ',' << csv_number(r.gamma) << ',' << csv_number(r.a) << ','
              << csv_number(r.V) << ',' << csv_number(r.V_err) << ',' << csv_number(r.Vprime) << ','
              << csv_number(r.N) << ',' << r.method << ',' << cfg.seed << "\n";
        emit(out, s.str());
    } else {
        json j;
        j["schema"] = kSchemaVersion;
        j["config"] = cfg.to_json();
        j["rows"] = json::array();
        for (const auto& r : rows)
            j["rows"].push_back({{"omega", ep.omega()}, {"gamma", r.gamma}, {"a", r.a}, {"V", r.V},
                                 {"V_err", r.V_err}, {"Vprime", number(r.Vprime)}, {"N", r.N},
                                 {"method", r.method}, {"seed", cfg.seed}});
        j["minimizer"] = {{"gamma", rows[best].gamma}, {"a", rows[best].a}, {"N", rows[best].N}};
        j["minimizer_at_symmetric_point"] = ok;
        emit(out, dump(j));
    }
    return code(ok ? ExitCode::ok : ExitCode::verified_failure);
}

int cmd_volume(const RunConfig& cfg, const std::string& out, std::ostream& log) {
    const EllipticityParams ep = cfg.ellipticity();
    const ShapeParams sp = ShapeParams::make(cfg.gamma, cfg.a, ep);
    const bool quad = cfg.method == "quadrature" || cfg.method == "both";
    const bool mc = cfg.method == "mc" || cfg.method == "both";
    if (!quad && !mc) throw ParameterError("--method must be quadrature, mc or both");

    json j;
    j["schema"] = kSchemaVersion;
    j["config"] = cfg.to_json();
    double vq = 0, eq = 0, vm = 0, em = 0;
    if (quad) {
        // sheared volumes follow from the determinant of C_a
        VolumeReport r = volume_quadrature(Domain(ShapeParams::make(cfg.gamma, 0.0, ep), ep));
        const double det = sp.det_shear();
        r.V *= det;
        r.error *= det;
        for (std::size_t k = 0; k < 7; ++k) {
            r.per_patch[k] *= det;
            r.per_patch_error[k] *= det;
        }
        r.params = params_json(sp, ep);
        vq = r.V;
        eq = r.error;
        j["quadrature"] = r.to_json();
        j["N"] = normalized_functional(r.V / det, cfg.a, ep);
        log << "quadrature V=" << r.V << " +- " << r.error << "\n";
    }
    if (mc) {
        const VolumeReport r = volume_mc(Domain(sp, ep), cfg.samples, cfg.seed);
        vm = r.V;
        em = r.error;
        j["monte_carlo"] = r.to_json();
        log << "monte-carlo V=" << r.V << " +- " << r.error << "\n";
    }
    bool ok = true;
    if (quad && mc) {
        const double z = std::abs(vq - vm) / std::sqrt(eq * eq + em * em);
        ok = z <= 4.0;
        j["agreement"] = {{"z", z}, {"within_4_sigma", ok}};
        log << "agreement z=" << z << (ok ? "" : "  (beyond 4 sigma)") << "\n";
    }
    emit(out, dump(j));
    return code(ok ? ExitCode::ok : ExitCode::verified_failure);
}

int cmd_nonsep(const RunConfig& cfg, const std::string& out, std::ostream& log) {
    const EllipticityParams ep = cfg.ellipticity();
    const int n = cfg.dimension;
    if (n < 2) throw ParameterError("--n must be at least 2");
    const std::uint64_t m = std::max<std::uint64_t>(cfg.samples, 1);
    const double sn = std::sqrt(static_cast<double>(n));
    const double theta0 = std::atan(1.0 / std::sqrt(static_cast<double>(n - 1)));

    double max_abs = 0.0, max_dev = 0.0, arg = 0.0;
    std::ostringstream rows;
    for (std::uint64_t i = 1; i <= m; ++i) {
        const double theta = theta0 + (kPi / 2.0 - theta0) * static_cast<double>(i) / static_cast<double>(m + 1);
        const SeparableResidual r = separable_candidate_residual(sn * theta, n, ep);
        if (std::abs(r.residual) > max_abs) {
            max_abs = std::abs(r.residual);
            arg = sn * theta;
        }
        max_dev = std::max(max_dev, std::abs(r.residual - r.closed_form));
        if (cfg.format == "csv")
            rows << csv_number(sn * theta) << ',' << csv_number(theta) << ',' << csv_number(r.residual) << ','
                 << csv_number(r.closed_form) << "\n";
    }
    const double dev_tol = 1e-12 * std::max(1.0, ep.Lambda());
    const bool ok = max_dev <= dev_tol;
    log << "max |residual|=" << max_abs << " at x=" << arg << "; closed-form deviation " << max_dev << "\n";

    if (cfg.format == "csv") {
        emit(out, "# config: " + cfg.to_json().dump() + "\nx,theta,residual,closed_form\n" + rows.str());
    } else {
        json j;
        j["schema"] = kSchemaVersion;
        j["config"] = cfg.to_json();
        j["max_abs_residual"] = max_abs;
        j["argmax_x"] = arg;
        j["max_closed_form_deviation"] = max_dev;
        j["closed_form_tolerance"] = dev_tol;
        if (n == 3) {
            const SeparableResidual half = separable_candidate_residual(sn * kPi / 3.0, n, ep);
            j["residual_at_cos_half"] = half.residual;
        }
        j["separable_is_eigenfunction"] = max_abs <= 1e-12;
        emit(out, dump(j));
    }
    return code(ok ? ExitCode::ok : ExitCode::verified_failure);
}

int cmd_solve(const RunConfig& cfg, const std::string& out, const std::string& field_out, std::ostream& log) {
    const EllipticityParams ep = cfg.ellipticity();
    GridField mask;
    if (!cfg.mask.empty()) {
        mask = read_voxels(cfg.mask);
    } else {
        if (!cfg.h) throw ParameterError("solve needs --h (or --mask)");
        if (cfg.cube) {
            mask = cube_mask(cfg.scale * kPi / 2.0, *cfg.h);
        } else {
            const Domain d(ShapeParams::make(cfg.gamma, cfg.a, ep), ep);
            mask = voxelize(d, *cfg.h, cfg.scale);
        }
    }

    json j;
    j["schema"] = kSchemaVersion;
    j["config"] = cfg.to_json();
    try {
        const EigenSolveResult r = solve_eigen(mask, ep, cfg.tol, cfg.maxit);
        j["result"] = r.to_json();
        if (!field_out.empty()) write_values(field_out, r.field);
        log << "mu=" << r.mu << " after " << r.iterations << " iterations (" << r.interior_nodes
            << " interior nodes, " << r.linear_solver << ")\n";
        emit(out, dump(j));
        return code(ExitCode::ok);
    } catch (const NonConvergence& e) {
        j["error"] = {{"kind", "non-convergence"}, {"message", e.what()}, {"mu_history", e.history()}};
        log << "error: " << e.what() << "\n";
        emit(out, dump(j));
        return code(e.exit_code());
    } catch (const SolverFailure& e) {
        j["error"] = {{"kind", "solver-failure"}, {"message", e.what()}};
        log << "error: " << e.what() << "\n";
        emit(out, dump(j));
        return code(e.exit_code());
    }
}

json load_record(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open " + path);
    std::string first;
    std::getline(f, first);
    const std::string tag = "# config: ";
    if (first.rfind(tag, 0) == 0) return json::parse(first.substr(tag.size()));
    f.seekg(0);
    const json j = json::parse(f);
    if (j.is_array() && !j.empty() && j[0].contains("config")) return j[0]["config"];
    if (!j.contains("config")) throw InvalidInput(path + " carries no run configuration");
    return j["config"];
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int cmd_rerun(const std::string& record, const std::string& out, bool check, std::ostream& log) {
    const RunConfig cfg = RunConfig::from_json(load_record(record));
    if (!check) return execute(cfg, out, log);

    const fs::path tmp = fs::temp_directory_path() / ("pucci3d-rerun-" + std::to_string(std::hash<std::string>{}(record)) +
                                                      "-" + std::to_string(cfg.seed));
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    const fs::path name = fs::path(record).filename();
    const fs::path target = cfg.command == "verify" ? tmp : tmp / name;
    std::ostringstream quiet;
    execute(cfg, target.string(), quiet);
    const fs::path regenerated = cfg.command == "verify" ? tmp / name : target;
    const bool same = fs::exists(regenerated) && slurp(regenerated.string()) == slurp(record);
    fs::remove_all(tmp);
    log << record << ": " << (same ? "reproduced bit-identically" : "DIFFERS from its regeneration") << "\n";
    return code(same ? ExitCode::ok : ExitCode::verified_failure);
}

}  // namespace

int execute(const RunConfig& cfg, const std::string& out, std::ostream& log) {
    if (cfg.format != "json" && cfg.format != "csv") throw ParameterError("--format must be json or csv");
    if (cfg.format == "csv" && cfg.command != "scan" && cfg.command != "nonsep")
        throw ParameterError("csv output is available for scan and nonsep only");
    if (cfg.command == "verify") return cmd_verify(cfg, out, log);
    if (cfg.command == "scan") return cmd_scan(cfg, out, log);
    if (cfg.command == "volume") return cmd_volume(cfg, out, log);
    if (cfg.command == "nonsep") return cmd_nonsep(cfg, out, log);
    if (cfg.command == "solve") return cmd_solve(cfg, out, cfg.field_out, log);
    throw ParameterError("unknown command '" + cfg.command + "'");
}

// ---------------------------------------------------------------------------
// argv front end

int run_cli(int argc, char** argv) {
    CLI::App app{"Pucci extremal eigenvalue toolkit"};
    app.require_subcommand(1);
    // --h is the grid spacing, so help is long-form only
    app.set_help_flag("--help", "print this help message and exit");

    RunConfig cfg;
    double omega = 0, lambda = 0, Lambda = 0, h = 0;
    std::string out;
    std::size_t threads = 0;
    std::string record;
    bool check = false;

    struct Flags {
        CLI::Option *omega, *lambda, *Lambda, *h;
    };
    std::vector<std::pair<CLI::App*, Flags>> subs;

    auto common = [&](CLI::App* sub) {
        Flags f{};
        f.omega = sub->add_option("--omega", omega, "ellipticity ratio Lambda/lambda (lambda = 1)");
        f.lambda = sub->add_option("--lambda", lambda, "lower ellipticity constant");
        f.Lambda = sub->add_option("--Lambda", Lambda, "upper ellipticity constant");
        f.omega->excludes(f.lambda)->excludes(f.Lambda);
        f.lambda->needs(f.Lambda);
        f.Lambda->needs(f.lambda);
        sub->add_option("--gamma", cfg.gamma, "shape parameter gamma")->capture_default_str();
        sub->add_option("--a", cfg.a, "shear parameter a")->capture_default_str();
        sub->add_option("--samples", cfg.samples, "sample count")->capture_default_str();
        sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
        f.h = sub->add_option("--h", h, "grid spacing");
        sub->add_option("--tol", cfg.tol, "solver tolerance")->capture_default_str();
        sub->add_option("--threads", threads, "worker thread cap (0 = all cores)");
        sub->add_option("--out", out, "output file (directory for verify)");
        sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        subs.emplace_back(sub, f);
        return sub;
    };

    common(app.add_subcommand("verify", "run the verification suites"));
    auto* scan = common(app.add_subcommand("scan", "volume and normalized functional over a (gamma, a) grid"));
    scan->add_option("--gamma-grid", cfg.gamma_grid, "gamma values")->delimiter(',');
    scan->add_option("--a-grid", cfg.a_grid, "shear values")->delimiter(',');
    auto* solve = common(app.add_subcommand("solve", "finite-difference principal half-eigenvalue"));
    solve->add_option("--maxit", cfg.maxit, "outer iteration cap")->capture_default_str();
    solve->add_option("--scale", cfg.scale, "scale the domain by this factor")->capture_default_str();
    solve->add_flag("--cube", cfg.cube, "use the cube (-pi/2, pi/2)^3 scaled by --scale");
    solve->add_option("--mask", cfg.mask, "voxel mask file");
    solve->add_option("--field-out", cfg.field_out, "write the eigenfunction as a float voxel file");
    auto* volume = common(app.add_subcommand("volume", "domain volume"));
    volume->add_option("--method", cfg.method, "quadrature, mc or both")
        ->check(CLI::IsMember({"quadrature", "mc", "both"}));
    auto* nonsep = common(app.add_subcommand("nonsep", "residual of the separable cosine candidate"));
    nonsep->add_option("--n", cfg.dimension, "space dimension")->capture_default_str();

    auto* rerun = app.add_subcommand("rerun", "regenerate an output from its embedded configuration");
    rerun->add_option("record", record, "JSON or CSV output file")->required();
    rerun->add_option("--out", out, "where to write the regenerated output");
    rerun->add_flag("--check", check, "compare the regeneration with the original byte for byte");
    rerun->add_option("--threads", threads, "worker thread cap (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : code(ExitCode::usage);
    }

    set_thread_limit(threads);
    try {
        if (rerun->parsed()) return cmd_rerun(record, out, check, std::cerr);
        for (auto& [sub, f] : subs) {
            if (!sub->parsed()) continue;
            cfg.command = sub->get_name();
            if (f.omega->count()) cfg.omega = omega;
            if (f.lambda->count()) cfg.lambda = lambda;
            if (f.Lambda->count()) cfg.Lambda = Lambda;
            if (f.h->count()) cfg.h = h;
            (void)cfg.ellipticity();
            return execute(cfg, out, std::cerr);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return code(e.exit_code());
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return code(ExitCode::usage);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return code(ExitCode::usage);
    }
    return code(ExitCode::usage);
}

}  // namespace pucci3d
