#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "pucci3d/cli.hpp"
#include "pucci3d/error.hpp"

using namespace pucci3d;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(PUCCI3D_CLI) + " " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

json load(const fs::path& p) {
    std::ifstream f(p);
    return json::parse(f);
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("pucci3d_cli_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("run configuration round trip") {
    RunConfig c;
    c.command = "scan";
    c.omega = 9.0;
    c.gamma_grid = {0.8, 1.0};
    c.a_grid = {0.0, 0.5};
    const json j = c.to_json();
    CHECK(j["schema"] == 1);
    CHECK(j["derived"]["Lambda"] == 9.0);
    CHECK(j["derived"]["lambda"] == 1.0);
    CHECK(RunConfig::from_json(j).to_json() == j);

    RunConfig both = c;
    both.lambda = 1.0;
    both.Lambda = 2.0;
    CHECK_THROWS_AS(both.ellipticity(), ParameterError);
    RunConfig none;
    CHECK_THROWS_AS(none.ellipticity(), ParameterError);
    CHECK_THROWS_AS(RunConfig::from_json(json::object()), InvalidInput);
}

TEST_CASE("verify writes one report per suite") {
    TempDir t("verify");
    CHECK(run("verify --omega 9 --gamma 1 --a 0 --samples 20000 --seed 7 --out " + t.path.string()) == 0);
    for (const char* s : {"residual", "c1", "boundary", "shear_bound", "block_identity"}) {
        const json j = load(t.path / (std::string(s) + ".json"));
        CHECK(j["schema"] == 1);
        CHECK(j["pass"] == true);
        CHECK(j["config"]["derived"]["omega"] == 9.0);
    }
}

TEST_CASE("usage errors exit 2") {
    CHECK(run("verify --omega 9 --gamma 3.5") == 2);
    CHECK(run("verify --omega 9 --lambda 1 --Lambda 2") == 2);
    CHECK(run("verify --gamma 1") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("solve --omega 9 --h 1.0") == 2);
    CHECK(run("--help") == 0);
}

TEST_CASE("omega one: equality margins vanish while the closure gap fails the boundary suite") {
    TempDir t("omega1");
    CHECK(run("verify --omega 1 --gamma 1 --a 1 --samples 10000 --out " + t.path.string()) == 1);
    const json sb = load(t.path / "shear_bound.json");
    CHECK(sb["pass"] == true);
    CHECK(sb["extra"]["max_abs_margin"].get<double>() <= 1e-10);
    const json b = load(t.path / "boundary.json");
    CHECK(b["pass"] == false);
    CHECK(b["extra"]["closure_gap_count"].get<int>() > 0);
}

TEST_CASE("scan finds the symmetric minimizer") {
    TempDir t("scan");
    const std::string csv = t / "scan.csv";
    CHECK(run("scan --omega 9 --gamma-grid 0.8,1,1.25 --a-grid 0,0.5 --format csv --out " + csv) == 0);
    std::ifstream f(csv);
    std::string line;
    std::getline(f, line);
    CHECK(line.rfind("# config: ", 0) == 0);
    std::getline(f, line);
    CHECK(line == "omega,gamma,a,V,V_err,Vprime,N,method,seed");
    int rows = 0;
    while (std::getline(f, line)) ++rows;
    CHECK(rows == 6);
    CHECK(run("scan --omega 9 --gamma-grid 1 --a-grid 0 --out " + (t / "one.json")) == 0);
    const json one = load(t / "one.json");
    CHECK(one["minimizer_at_symmetric_point"] == true);
    CHECK(run("rerun " + csv + " --check") == 0);
}

TEST_CASE("nonsep") {
    TempDir t("nonsep");
    CHECK(run("nonsep --omega 2 --n 3 --samples 2000 --out " + (t / "two.json")) == 0);
    CHECK(load(t / "two.json")["max_abs_residual"].get<double>() > 0.1);
    CHECK(run("nonsep --omega 1 --n 3 --samples 2000 --out " + (t / "one.json")) == 0);
    CHECK(load(t / "one.json")["max_abs_residual"].get<double>() <= 1e-12);
}

TEST_CASE("volume both methods agree") {
    TempDir t("volume");
    CHECK(run("volume --omega 9 --gamma 1 --method both --samples 200000 --out " + (t / "v.json")) == 0);
    const json j = load(t / "v.json");
    CHECK(j["agreement"]["within_4_sigma"] == true);
    CHECK(run("rerun " + (t / "v.json") + " --check") == 0);
}

TEST_CASE("solve writes results and fields") {
    TempDir t("solve");
    CHECK(run("solve --omega 1 --cube --h 0.19634954084936207 --out " + (t / "s.json") + " --field-out " +
              (t / "u.vox")) == 0);
    const json j = load(t / "s.json");
    CHECK(j["result"]["mu"].get<double>() > 2.9);
    CHECK(fs::file_size(t.path / "u.vox") > 0);
    // an iteration cap that cannot be met is a numerical-budget failure with its history
    CHECK(run("solve --omega 1 --cube --h 0.19634954084936207 --maxit 1 --out " + (t / "f.json")) == 3);
    CHECK(load(t / "f.json")["error"]["mu_history"].size() == 1);
}

TEST_CASE("rerun detects a tampered report") {
    TempDir t("tamper");
    CHECK(run("verify --omega 9 --gamma 1.25 --samples 2000 --out " + t.path.string()) == 0);
    CHECK(run("rerun " + (t / "c1.json") + " --check") == 0);
    json j = load(t.path / "c1.json");
    j["statistic"] = 1.0;
    std::ofstream(t / "c1.json") << j.dump(2) << "\n";
    CHECK(run("rerun " + (t / "c1.json") + " --check") == 1);
}
