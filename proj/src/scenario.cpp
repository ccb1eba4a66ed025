#include "nsdyn/scenario.hpp"

#include "nsdyn/drill_dc.hpp"
#include "nsdyn/error.hpp"
#include "nsdyn/export.hpp"
#include "nsdyn/parallel.hpp"
#include "nsdyn/params.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <system_error>

namespace nsdyn {

namespace {

const std::array<std::string, 6> kBuiltinIds = {"tora-capture",  "tora-normal", "drill-dc-hidden",
                                                "drill-dc-normal", "drill-ind-a", "drill-ind-b"};

constexpr double kBuiltinHorizon = 300.0;

ScenarioSpec make_builtin(std::string id, std::string model, std::vector<double> initial) {
    ScenarioSpec s;
    s.id = std::move(id);
    s.params = default_params(model);
    s.model = std::move(model);
    s.initial = std::move(initial);
    s.integration.t_end = kBuiltinHorizon;
    s.analysis.classify = true;
    s.analysis.workers = 0;
    return s;
}

std::size_t index_of(const SystemModel& model, std::string_view label) {
    const auto i = model.coordinate_index(label);
    if (!i) {
        throw ConfigError("model '" + std::string(model.name()) + "' has no coordinate '" + std::string(label) + "'");
    }
    return *i;
}

std::string file_stem(std::string_view id) {
    std::string out(id);
    for (char& c : out) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                        c == '_' || c == '.';
        if (!ok) {
            c = '_';
        }
    }
    return out.empty() ? "run" : out;
}

}  // namespace

std::span<const std::string> builtin_scenario_ids() noexcept { return kBuiltinIds; }

bool is_builtin_scenario(std::string_view id) noexcept {
    return std::find(kBuiltinIds.begin(), kBuiltinIds.end(), id) != kBuiltinIds.end();
}

ScenarioSpec builtin_scenario(std::string_view id) {
    if (id == "tora-capture") {
        auto s = make_builtin("tora-capture", "tora", {0.0, 0.0, 0.0, 0.0});
        s.analysis.sommerfeld_pair = "tora-normal";
        return s;
    }
    if (id == "tora-normal") {
        return make_builtin("tora-normal", "tora", {0.0, 0.0, 0.0, 40.0});
    }
    if (id == "drill-dc-hidden") {
        return make_builtin("drill-dc-hidden", "drill_dc", {0.0, 0.0, 0.0, 0.0});
    }
    if (id == "drill-dc-normal") {
        return make_builtin("drill-dc-normal", "drill_dc", {0.0, kDrillDcNormalSpeed, kDrillDcNormalSpeed, 0.0});
    }
    // Induction-model velocities are relative to the field: 0 is synchronous
    // rotation, -omega_field is a disc at rest.
    if (id == "drill-ind-a") {
        return make_builtin("drill-ind-a", "drill_induction", {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    }
    if (id == "drill-ind-b") {
        const double rest = -default_params("drill_induction").get("omega_field");
        return make_builtin("drill-ind-b", "drill_induction", {0.0, rest, 0.0, rest, 0.0, 0.0, 0.0});
    }
    std::string msg = "unknown scenario '" + std::string(id) + "'";
    if (auto hint = closest_match(id, kBuiltinIds)) {
        msg += "; did you mean '" + *hint + "'?";
    }
    throw ConfigError(msg);
}

void validate(const ScenarioSpec& spec) {
    const auto model = build_model(spec.model, spec.params);
    if (spec.initial.size() != model->dim()) {
        throw ConfigError("initial: model '" + spec.model + "' needs " + std::to_string(model->dim()) +
                          " coordinates, got " + std::to_string(spec.initial.size()));
    }
    if (!all_finite(spec.initial)) {
        throw ConfigError("initial: coordinates must be finite");
    }
    validate(spec.integration);
    const auto& a = spec.analysis;
    if (!(a.tail_fraction > 0.0 && a.tail_fraction <= 1.0)) {
        throw ConfigError("analysis.tail_fraction: must lie in (0, 1]");
    }
    if (a.classify && !(a.classify_cfg.radius > 0.0)) {
        throw ConfigError("analysis.radius: must be positive");
    }
    if (a.classify && a.classify_cfg.n_probes == 0) {
        throw ConfigError("analysis.n_probes: must be positive");
    }
    if (a.sommerfeld_pair) {
        const auto pair = builtin_scenario(*a.sommerfeld_pair);
        if (pair.model != spec.model) {
            throw ConfigError("analysis.sommerfeld_pair: scenario '" + *a.sommerfeld_pair + "' uses model '" +
                              pair.model + "', not '" + spec.model + "'");
        }
    }
    if (a.basin) {
        if (a.basin->base.size() != model->dim()) {
            throw ConfigError("analysis.basin: base state dimension mismatch");
        }
        for (const GridAxis* axis : {&a.basin->x, &a.basin->y}) {
            if (axis->n == 0 || axis->coordinates.empty()) {
                throw ConfigError("analysis.basin: every axis needs a coordinate and at least one point");
            }
            for (std::size_t c : axis->coordinates) {
                if (c >= model->dim()) {
                    throw ConfigError("analysis.basin: coordinate index " + std::to_string(c) + " out of range");
                }
            }
        }
    }
}

BasinGridSpec default_basin_grid(const SystemModel& model, std::size_t n) {
    BasinGridSpec g;
    g.base.assign(model.dim(), 0.0);
    g.x.n = n;
    g.y.n = n;
    const std::string_view name = model.name();
    if (name == "tora") {
        g.x = {{index_of(model, "theta_dot")}, 0.0, 60.0, n};
        g.y = {{index_of(model, "x")}, -0.1, 0.1, n};
    } else if (name == "drill_dc") {
        g.x = {{index_of(model, "omega_u"), index_of(model, "omega_l")}, 0.0, 10.0, n};
        g.y = {{index_of(model, "alpha")}, -2.0, 2.0, n};
    } else if (name == "drill_induction") {
        const double field = model.params().get("omega_field");
        g.x = {{index_of(model, "omega_u"), index_of(model, "omega_l")}, -field, 0.0, n};
        g.y = {{index_of(model, "theta_u")}, -2.0, 2.0, n};
    } else {
        throw ConfigError("no default basin grid for model '" + std::string(name) + "'");
    }
    return g;
}

ScenarioResult execute_scenario(const ScenarioSpec& spec) {
    validate(spec);
    const auto started = std::chrono::steady_clock::now();
    const auto model = build_model(spec.model, spec.params);
    const std::size_t workers = spec.analysis.workers == 0 ? default_workers() : spec.analysis.workers;

    MetricsConfig metrics = metrics_config(spec.integration);
    metrics.tail_fraction = spec.analysis.tail_fraction;
    ClassifyConfig classify = spec.analysis.classify_cfg;
    classify.workers = workers;

    ScenarioResult result;
    RunSummary& s = result.summary;
    s.scenario_id = spec.id;
    s.model = spec.model;
    s.params = spec.params;
    s.labels = model->labels();
    s.initial = spec.initial;
    s.integration = spec.integration;
    s.equilibria = find_equilibria(*model);

    auto analyse = [&](const std::vector<double>& initial, Trajectory* keep) {
        Trajectory traj = integrate(*model, State{0.0, initial}, spec.integration);
        AttractorReport report = steady_state_metrics(*model, traj, metrics);
        if (spec.analysis.classify) {
            report = classify_attractor(*model, std::move(report), s.equilibria, spec.integration, metrics, classify);
        }
        if (keep) {
            *keep = std::move(traj);
        }
        return report;
    };

    s.reports.push_back(analyse(spec.initial, &result.trajectory));
    s.report_scenarios.push_back(spec.id);
    s.stats = result.trajectory.stats;

    if (spec.analysis.sommerfeld_pair) {
        const auto pair = builtin_scenario(*spec.analysis.sommerfeld_pair);
        s.reports.push_back(analyse(pair.initial, nullptr));
        s.report_scenarios.push_back(pair.id);
        s.sommerfeld_ratio = sommerfeld_ratio(s.reports[0], s.reports[1]);
    }
    if (spec.analysis.basin) {
        s.basin = basin_scan(*model, *spec.analysis.basin, spec.integration, metrics, workers);
    }
    s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

RunSummary run_scenario(const ScenarioSpec& spec, const std::filesystem::path& out_dir, ArtifactPaths* paths) {
    validate(spec);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw IoError("cannot create output directory '" + out_dir.string() + "'");
    }
    auto result = execute_scenario(spec);
    const std::string stem = file_stem(spec.id);
    const ArtifactPaths out{out_dir / (stem + ".csv"), out_dir / (stem + ".json"), out_dir / ("plot_" + stem + ".py")};
    export_trajectory(result.trajectory, out.trajectory_csv);
    export_summary(result.summary, out.summary_json);
    const auto model = build_model(spec.model, spec.params);
    write_file_atomic(out.plot_script, plot_script(result.summary, *model, out.trajectory_csv.filename().string()));
    if (paths) {
        *paths = out;
    }
    return std::move(result.summary);
}

}  // namespace nsdyn
