#include "nsdyn/config.hpp"
#include "nsdyn/error.hpp"
#include "nsdyn/export.hpp"
#include "nsdyn/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kRuntime = 2, kIo = 3 };

struct CommonOptions {
    std::string scenario;
    std::string config;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<double> t_end;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("scenario", o.scenario, "Built-in scenario id (see 'list')");
    cmd->add_option("-c,--config", o.config, "Scenario config file")->check(CLI::ExistingFile);
    cmd->add_option("-o,--out-dir", o.out_dir, "Directory for CSV, JSON and plot script")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Probe seed");
    cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
    cmd->add_option("--t-end", o.t_end, "Integration horizon [s]");
}

nsdyn::ScenarioSpec resolve(const CommonOptions& o) {
    if (o.scenario.empty() == o.config.empty()) {
        throw nsdyn::ConfigError("give either a scenario id or --config");
    }
    nsdyn::ScenarioSpec spec = o.config.empty() ? nsdyn::builtin_scenario(o.scenario) : nsdyn::read_config(o.config);
    if (o.seed) {
        spec.analysis.classify_cfg.seed = *o.seed;
    }
    if (o.workers) {
        spec.analysis.workers = *o.workers;
    }
    if (o.t_end) {
        spec.integration.t_end = *o.t_end;
    }
    nsdyn::validate(spec);
    return spec;
}

void print_report(const std::string& scenario, const nsdyn::AttractorReport& r) {
    std::printf("%-18s kind=%-17s classification=%-14s rotor_mean=%.6g amplitude=%.6g", scenario.c_str(),
                std::string(nsdyn::to_string(r.kind)).c_str(), std::string(nsdyn::to_string(r.classification)).c_str(),
                r.rotor_mean_velocity, r.amplitude);
    if (r.period) {
        std::printf(" period=%.6g", *r.period);
    }
    if (!r.probes.empty()) {
        std::size_t converged = 0;
        for (const auto& p : r.probes) {
            converged += p.converged ? 1 : 0;
        }
        std::printf(" probes=%zu converged=%zu", r.probes.size(), converged);
    }
    std::printf("\n");
    for (const auto& w : r.warnings) {
        std::fprintf(stderr, "warning: %s: %s\n", scenario.c_str(), w.c_str());
    }
}

void print_summary(const nsdyn::RunSummary& s, const nsdyn::ArtifactPaths& paths) {
    for (std::size_t i = 0; i < s.reports.size(); ++i) {
        print_report(s.report_scenarios[i], s.reports[i]);
    }
    if (s.sommerfeld_ratio) {
        std::printf("sommerfeld_ratio=%.6g\n", *s.sommerfeld_ratio);
    }
    std::printf("equilibria=%zu", s.equilibria.size());
    for (const auto& e : s.equilibria) {
        std::printf(" [%s%s]", std::string(nsdyn::to_string(e.stability)).c_str(), e.stuck ? ", stuck" : "");
    }
    std::printf("\n");
    if (s.basin) {
        std::printf("basin %zux%zu:", s.basin->grid.x.n, s.basin->grid.y.n);
        for (const auto& a : s.basin->attractors) {
            std::printf(" %s", a.label.c_str());
        }
        std::printf("\n");
    }
    std::printf("wrote %s, %s, %s (%.2f s)\n", paths.trajectory_csv.string().c_str(),
                paths.summary_json.string().c_str(), paths.plot_script.string().c_str(), s.wall_seconds);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-driven simulation and hidden-attractor analysis of electromechanical models"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List built-in scenarios and models");

    CommonOptions run_opts;
    auto* run = app.add_subcommand("run", "Run a scenario and write its artifacts");
    add_common(run, run_opts);

    CommonOptions classify_opts;
    auto* classify = app.add_subcommand("classify", "Run a scenario and classify its attractor");
    add_common(classify, classify_opts);
    double radius = 0.1;
    std::size_t probes = 50;
    classify->add_option("--radius", radius, "Probe ball radius (normalized)")->capture_default_str();
    classify->add_option("--probes", probes, "Probes per equilibrium")->capture_default_str();

    CommonOptions scan_opts;
    auto* scan = app.add_subcommand("scan", "Basin-of-attraction scan over the scenario's grid");
    add_common(scan, scan_opts);
    std::size_t grid_n = 20;
    scan->add_option("--grid-n", grid_n, "Points per axis for the default grid")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*list) {
            for (const auto& id : nsdyn::builtin_scenario_ids()) {
                const auto spec = nsdyn::builtin_scenario(id);
                std::printf("%-18s model=%s\n", id.c_str(), spec.model.c_str());
            }
            return kOk;
        }

        nsdyn::ScenarioSpec spec;
        std::string out_dir;
        if (*run) {
            spec = resolve(run_opts);
            out_dir = run_opts.out_dir;
        } else if (*classify) {
            spec = resolve(classify_opts);
            spec.analysis.classify = true;
            spec.analysis.classify_cfg.radius = radius;
            spec.analysis.classify_cfg.n_probes = probes;
            out_dir = classify_opts.out_dir;
        } else {
            spec = resolve(scan_opts);
            if (!spec.analysis.basin) {
                auto grid = nsdyn::default_basin_grid(*nsdyn::build_model(spec.model, spec.params), grid_n);
                grid.base = spec.initial;
                spec.analysis.basin = grid;
            }
            spec.analysis.classify = false;
            spec.analysis.sommerfeld_pair.reset();
            out_dir = scan_opts.out_dir;
        }
        nsdyn::validate(spec);
        nsdyn::ArtifactPaths paths;
        const auto summary = nsdyn::run_scenario(spec, out_dir, &paths);
        print_summary(summary, paths);
        return kOk;
    } catch (const nsdyn::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const nsdyn::IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return kIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntime;
    }
}
