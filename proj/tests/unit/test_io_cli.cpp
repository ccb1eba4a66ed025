#include "catch_amalgamated.hpp"

#include "nsdyn/config.hpp"
#include "nsdyn/error.hpp"
#include "nsdyn/export.hpp"
#include "nsdyn/scenario.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace nsdyn;
namespace fs = std::filesystem;

namespace {

/// Fresh directory under the system temp dir, removed on scope exit.
struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("nsdyn_test_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string error_of(std::string_view config) {
    try {
        (void)parse_config(config);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::size_t line_count(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

ScenarioSpec short_run(std::string_view id, double t_end) {
    auto spec = builtin_scenario(id);
    spec.integration.t_end = t_end;
    spec.analysis.classify_cfg.n_probes = 2;
    spec.analysis.workers = 2;
    return spec;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(NSDYN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("a config naming a built-in equals the built-in", "[config]") {
    CHECK(parse_config("[model]\nscenario = drill-dc-hidden\n") == builtin_scenario("drill-dc-hidden"));
    CHECK(parse_config("# comment\n\n[model] ; trailing\n  scenario = tora-capture  \n") ==
          builtin_scenario("tora-capture"));
}

TEST_CASE("config overrides are marked user-provided", "[config]") {
    const auto spec = parse_config("[model]\nscenario = drill-dc-hidden\n[params]\nv = 4.0\n[integration]\nt_end = 50\n");
    CHECK(spec.params.get("v") == 4.0);
    CHECK(spec.params.entry("v").provenance == Provenance::user);
    CHECK(spec.params.entry("k_m").provenance == Provenance::published);
    CHECK(spec.integration.t_end == 50.0);
}

TEST_CASE("config from a model name starts at rest", "[config]") {
    const auto spec = parse_config("[model]\nname = tora\nid = mine\n[initial]\ntheta_dot = 40\n");
    CHECK(spec.model == "tora");
    CHECK(spec.id == "mine");
    CHECK(spec.initial == std::vector<double>{0.0, 0.0, 0.0, 40.0});
    const auto by_state = parse_config("[model]\nname = tora\n[initial]\nstate = 0, 0, 0, 40\n");
    CHECK(by_state.initial == spec.initial);
}

TEST_CASE("unknown config names come with suggestions", "[config]") {
    const auto param = error_of("[model]\nname = tora\n[params]\nstiffnes = 1\n");
    CHECK(param.find("line 4") != std::string::npos);
    CHECK(param.find("'k'") != std::string::npos);
    CHECK(param.find("spring stiffness") != std::string::npos);
    CHECK(error_of("[modle]\n").find("[model]") != std::string::npos);
    CHECK(error_of("[model]\nname = tora\n[integration]\nreltol = 1\n").find("rel_tol") != std::string::npos);
    CHECK(error_of("[model]\nname = tora\n[initial]\ntheta_dto = 1\n").find("theta_dot") != std::string::npos);
    CHECK(error_of("[model]\nscenario = tora-captur\n").find("tora-capture") != std::string::npos);
}

TEST_CASE("config errors carry line numbers", "[config]") {
    CHECK(error_of("[model]\nname = tora\n\n[integration]\nt_end = soon\n").rfind("line 5: integration.t_end", 0) == 0);
    CHECK(error_of("[model]\nname = tora\nname = drill_dc\n").find("duplicate") != std::string::npos);
    CHECK(error_of("[model]\nname tora\n").rfind("line 2", 0) == 0);
    CHECK(error_of("rel_tol = 1\n").rfind("line 1", 0) == 0);
    CHECK_FALSE(error_of("[integration]\nt_end = 5\n").empty());
}

TEST_CASE("config validation rejects bad shapes and values", "[config]") {
    CHECK(error_of("[model]\nname = tora\n[initial]\nstate = 1, 2\n").find("4 coordinates") != std::string::npos);
    CHECK(error_of("[model]\nname = tora\n[integration]\nt_end = -1\n").find("t_end") != std::string::npos);
    CHECK(error_of("[model]\nname = tora\n[params]\nJ = 0.00001\n").find("invertible") != std::string::npos);
    CHECK(error_of("[model]\nname = drill_dc\n[analysis]\nsommerfeld_pair = tora-normal\n").find("sommerfeld_pair") !=
          std::string::npos);
}

TEST_CASE("config basin keys build a grid", "[config]") {
    const auto spec = parse_config(
        "[model]\nname = drill_dc\n[analysis]\nbasin = true\nbasin_x = omega_u, omega_l\nbasin_x_lo = 1\n"
        "basin_x_hi = 9\nbasin_x_n = 3\nbasin_y = alpha\nbasin_y_n = 2\n");
    REQUIRE(spec.analysis.basin.has_value());
    CHECK(spec.analysis.basin->x.coordinates == std::vector<std::size_t>{1, 2});
    CHECK(spec.analysis.basin->x.lo == 1.0);
    CHECK(spec.analysis.basin->x.hi == 9.0);
    CHECK(spec.analysis.basin->x.n == 3);
    CHECK(spec.analysis.basin->y.coordinates == std::vector<std::size_t>{0});
    CHECK(spec.analysis.basin->y.n == 2);
}

TEST_CASE("config files are read from disk", "[config]") {
    TempDir dir;
    const auto path = dir.path / "run.ini";
    std::ofstream(path) << "[model]\nscenario = drill-dc-normal\n";
    CHECK(read_config(path) == builtin_scenario("drill-dc-normal"));
    CHECK_THROWS_AS(read_config(dir.path / "missing.ini"), IoError);
}

TEST_CASE("trajectory CSV layout", "[csv]") {
    Trajectory traj({"x", "v"});
    traj.append(0.0, std::vector<double>{1.0, 0.0}, 0);
    traj.append(0.5, std::vector<double>{0.1, -0.3}, 1);
    const auto text = trajectory_csv(traj);
    CHECK(line_count(text) == 3);
    CHECK(text.rfind("t,x,v,stuck,event,surface\n", 0) == 0);
    CHECK(text.find("0.5,0.10000000000000001,-0.29999999999999999,1,,\n") != std::string::npos);
}

TEST_CASE("trajectory CSV round-trips byte for byte", "[csv]") {
    const auto m = build_model("drill_dc");
    IntegrationConfig cfg;
    cfg.t_end = 30.0;
    cfg.output_step = 0.05;
    const auto traj = integrate(*m, State{0.0, {0.0, 0.0, 0.0, 0.0}}, cfg);
    REQUIRE_FALSE(traj.events().empty());
    const auto text = trajectory_csv(traj);
    const auto back = parse_trajectory_csv(text);
    CHECK(back.times() == traj.times());
    CHECK(back.events() == traj.events());
    CHECK(trajectory_csv(back) == text);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        REQUIRE(back.stuck_mask(k) == traj.stuck_mask(k));
    }
}

TEST_CASE("malformed CSV is reported with its line", "[csv]") {
    try {
        (void)parse_trajectory_csv("t,x,stuck,event,surface\n0,1,0,,\n1,abc,0,,\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_trajectory_csv(""), ConfigError);
    CHECK_THROWS_AS(export_trajectory(Trajectory({"x"}), "unused.csv"), DomainError);
}

TEST_CASE("summary JSON round-trips", "[json]") {
    auto spec = short_run("tora-capture", 40.0);
    spec.analysis.basin = default_basin_grid(*build_model("tora"), 2);
    const auto summary = execute_scenario(spec).summary;
    REQUIRE(summary.sommerfeld_ratio.has_value());
    REQUIRE(summary.basin.has_value());
    const auto text = summary_json(summary);
    const auto back = parse_summary_json(text);
    CHECK(back == summary);
    CHECK(summary_json(back) == text);
    CHECK(text.find("\"provenance\": \"published\"") != std::string::npos);
    CHECK(text.rfind("{\n  \"scenario_id\": \"tora-capture\"", 0) == 0);
    CHECK_THROWS_AS(parse_summary_json("{\"scenario_id\": 3}"), ConfigError);
}

TEST_CASE("drill summaries keep equilibria and probes", "[json]") {
    const auto summary = execute_scenario(short_run("drill-dc-hidden", 60.0)).summary;
    REQUIRE_FALSE(summary.equilibria.empty());
    REQUIRE(summary.reports.size() == 1);
    const auto back = parse_summary_json(summary_json(summary));
    CHECK(back == summary);
}

TEST_CASE("run_scenario writes its three artifacts", "[scenario]") {
    TempDir dir;
    ArtifactPaths paths;
    const auto summary = run_scenario(short_run("drill-dc-normal", 20.0), dir.path / "out", &paths);
    CHECK(fs::is_regular_file(paths.trajectory_csv));
    CHECK(fs::is_regular_file(paths.summary_json));
    CHECK(fs::is_regular_file(paths.plot_script));
    CHECK(paths.trajectory_csv.filename() == "drill-dc-normal.csv");
    CHECK(read_summary(paths.summary_json) == summary);
    CHECK(read_trajectory(paths.trajectory_csv).size() > 1);
    CHECK(read_file(paths.plot_script).find("drill-dc-normal.csv") != std::string::npos);
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path / "out")) {
        ++entries;
    }
    CHECK(entries == 3);
}

TEST_CASE("an unusable output directory is an I/O error", "[scenario]") {
    TempDir dir;
    std::ofstream(dir.path / "file") << "x";
    CHECK_THROWS_AS(run_scenario(short_run("drill-dc-normal", 20.0), dir.path / "file" / "sub"), IoError);
    CHECK_THROWS_AS(write_file_atomic(dir.path / "missing" / "a.txt", "x"), IoError);
}

TEST_CASE("every built-in scenario runs", "[scenario]") {
    REQUIRE(builtin_scenario_ids().size() == 6);
    for (const auto& id : builtin_scenario_ids()) {
        INFO(id);
        const auto result = execute_scenario(short_run(id, 30.0));
        CHECK(result.summary.scenario_id == id);
        CHECK(result.trajectory.back().t == 30.0);
        CHECK_FALSE(result.summary.reports.empty());
    }
    CHECK_THROWS_AS(builtin_scenario("drill-dc-hiden"), ConfigError);
}

TEST_CASE("CLI exit codes", "[cli]") {
    TempDir dir;
    const std::string out = " -o " + dir.path.string() + "/cli";
    CHECK(run_cli("list") == 0);
    CHECK(run_cli("run drill-dc-normal --t-end 20 --workers 1" + out) == 0);
    CHECK(fs::is_regular_file(dir.path / "cli" / "drill-dc-normal.json"));
    CHECK(run_cli("classify drill-dc-hidden --t-end 40 --probes 2 --radius 0.05 --seed 7" + out) == 0);
    CHECK(run_cli("scan drill-dc-normal --t-end 20 --grid-n 2" + out) == 0);
    CHECK(run_cli("run no-such-scenario" + out) == 1);
    CHECK(run_cli("run drill-dc-normal --t-end -5" + out) == 1);
    CHECK(run_cli("frobnicate") == 1);
    CHECK(run_cli("run") == 1);

    std::ofstream(dir.path / "bad.ini") << "[model]\nname = tora\n[params]\nstiffnes = 3\n";
    CHECK(run_cli("run -c " + (dir.path / "bad.ini").string() + out) == 1);
    std::ofstream(dir.path / "good.ini") << "[model]\nname = tora\nid = cfg-run\n[integration]\nt_end = 20\n";
    CHECK(run_cli("run -c " + (dir.path / "good.ini").string() + out) == 0);
    CHECK(fs::is_regular_file(dir.path / "cli" / "cfg-run.csv"));

    std::ofstream(dir.path / "blocker") << "x";
    CHECK(run_cli("run drill-dc-normal --t-end 20 -o " + (dir.path / "blocker" / "sub").string()) == 3);
}
