#pragma once

#include "nsdyn/basin.hpp"
#include "nsdyn/classify.hpp"
#include "nsdyn/equilibrium.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nsdyn {

struct AnalysisSpec {
    bool classify = false;
    ClassifyConfig classify_cfg;
    double tail_fraction = 0.25;
    /// Scenario id whose rotor speed is the denominator of the Sommerfeld ratio.
    std::optional<std::string> sommerfeld_pair;
    std::optional<BasinGridSpec> basin;
    std::size_t workers = 1;  ///< basin and probe threads; 0 picks the hardware concurrency

    friend bool operator==(const AnalysisSpec&, const AnalysisSpec&) = default;
};

struct ScenarioSpec {
    std::string id;
    std::string model;
    ParamTable params;
    std::vector<double> initial;
    IntegrationConfig integration;
    AnalysisSpec analysis;

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Throws ConfigError naming the offending field.
void validate(const ScenarioSpec& spec);

/// Ids of the six built-in scenarios.
[[nodiscard]] std::span<const std::string> builtin_scenario_ids() noexcept;
[[nodiscard]] bool is_builtin_scenario(std::string_view id) noexcept;
/// Built-in scenario by id; ConfigError with a suggestion when unknown.
[[nodiscard]] ScenarioSpec builtin_scenario(std::string_view id);

/// Default basin grid for a model: disc or rotor speeds along x, the torsion
/// (or cart position) along y.
[[nodiscard]] BasinGridSpec default_basin_grid(const SystemModel& model, std::size_t n = 20);

struct RunSummary {
    std::string scenario_id;
    std::string model;
    std::vector<AttractorReport> reports;  ///< this scenario, then the Sommerfeld pair if any
    std::vector<std::string> report_scenarios;
    std::optional<double> sommerfeld_ratio;
    std::vector<Equilibrium> equilibria;
    std::optional<BasinMap> basin;
    double wall_seconds = 0.0;
    ParamTable params;               ///< resolved parameters with provenance
    std::vector<std::string> labels;
    std::vector<double> initial;
    IntegrationConfig integration;
    IntegrationStats stats;

    friend bool operator==(const RunSummary& a, const RunSummary& b) {
        return a.scenario_id == b.scenario_id && a.model == b.model && a.reports == b.reports &&
               a.report_scenarios == b.report_scenarios && a.sommerfeld_ratio == b.sommerfeld_ratio &&
               a.equilibria == b.equilibria && a.basin == b.basin && a.wall_seconds == b.wall_seconds &&
               a.params == b.params && a.labels == b.labels && a.initial == b.initial &&
               a.integration == b.integration && a.stats.accepted == b.stats.accepted &&
               a.stats.rejected == b.stats.rejected && a.stats.rhs_evaluations == b.stats.rhs_evaluations;
    }
};

struct ScenarioResult {
    RunSummary summary;
    Trajectory trajectory;
};

/// Runs the scenario and its analyses without touching the disk.
[[nodiscard]] ScenarioResult execute_scenario(const ScenarioSpec& spec);

struct ArtifactPaths {
    std::filesystem::path trajectory_csv;
    std::filesystem::path summary_json;
    std::filesystem::path plot_script;
};

/// Runs the scenario and writes <id>.csv, <id>.json and plot_<id>.py into
/// out_dir (created when missing). Each file is written to a temporary name
/// and renamed into place.
RunSummary run_scenario(const ScenarioSpec& spec, const std::filesystem::path& out_dir,
                        ArtifactPaths* paths = nullptr);

}  // namespace nsdyn
