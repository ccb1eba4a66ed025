#include "nsdyn/classify.hpp"

#include "nsdyn/error.hpp"
#include "nsdyn/parallel.hpp"

#include <cmath>
#include <random>

namespace nsdyn {

namespace {

/// Real parts of the eigenvectors whose eigenvalue has positive real part,
/// each normalized in the scaled coordinates.
std::vector<std::vector<double>> unstable_directions(const SystemModel& model, const Equilibrium& eq,
                                                     std::span<const double> scale) {
    const Eigen::MatrixXd j = jacobian(model, eq.state.x, JacobianMode::reduced);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(j);
    std::vector<std::vector<double>> dirs;
    for (Eigen::Index k = 0; k < j.rows(); ++k) {
        if (!(solver.eigenvalues()(k).real() > 0.0)) {
            continue;
        }
        std::vector<double> v(static_cast<std::size_t>(j.rows()));
        double norm = 0.0;
        for (Eigen::Index i = 0; i < j.rows(); ++i) {
            v[static_cast<std::size_t>(i)] = solver.eigenvectors()(i, k).real() / scale[static_cast<std::size_t>(i)];
            norm += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        }
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (double& e : v) {
                e /= norm;
            }
            dirs.push_back(std::move(v));
        }
    }
    return dirs;
}

/// Uniform point in the d-ball of radius r.
std::vector<double> ball_point(std::mt19937_64& rng, std::size_t d, double r) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    std::vector<double> p(d);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& e : p) {
            e = normal(rng);
            norm += e * e;
        }
    } while (norm == 0.0);
    const double radius = r * std::pow(uniform(rng), 1.0 / static_cast<double>(d)) / std::sqrt(norm);
    for (double& e : p) {
        e *= radius;
    }
    return p;
}

}  // namespace

AttractorReport classify_attractor(const SystemModel& model, AttractorReport report,
                                   const std::vector<Equilibrium>& equilibria, const IntegrationConfig& integration,
                                   const MetricsConfig& metrics, const ClassifyConfig& cfg) {
    report.probes.clear();
    if (report.kind == AttractorKind::equilibrium) {
        report.classification = Classification::not_applicable;
        return report;
    }
    if (report.kind == AttractorKind::unresolved) {
        report.classification = Classification::unclassified;
        report.warnings.push_back("attractor is unresolved; classification skipped");
        return report;
    }
    if (equilibria.empty()) {
        report.classification = Classification::hidden;
        return report;
    }
    if (!(cfg.radius > 0.0)) {
        throw ConfigError("classify: radius must be positive");
    }

    std::vector<std::size_t> targets;
    for (std::size_t i = 0; i < equilibria.size(); ++i) {
        if (equilibria[i].stability == Stability::unstable) {
            targets.push_back(i);
        }
    }
    if (targets.empty()) {
        for (std::size_t i = 0; i < equilibria.size(); ++i) {
            targets.push_back(i);
        }
    }

    const std::size_t d = model.reduced_dim();
    std::vector<double> scale(d, 1.0);
    for (std::size_t k = 0; k < d && k < report.tail_amplitudes.size(); ++k) {
        if (report.tail_amplitudes[k] > 0.0) {
            scale[k] = report.tail_amplitudes[k];
        }
    }
    std::vector<std::vector<std::vector<double>>> directions(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const auto& eq = equilibria[targets[t]];
        if (eq.stability == Stability::unstable) {
            directions[t] = unstable_directions(model, eq, scale);
        }
    }

    const std::size_t total = targets.size() * cfg.n_probes;
    std::vector<Probe> probes(total);
    std::vector<std::string> failures(total);
    parallel_for(total, cfg.workers == 0 ? default_workers() : cfg.workers, [&](std::size_t k) {
        const std::size_t t = k / cfg.n_probes;
        const auto& eq = equilibria[targets[t]];
        std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(k)};
        std::mt19937_64 rng(seq);

        const auto& dirs = directions[t];
        std::vector<double> offset;
        if (dirs.empty()) {
            offset = ball_point(rng, d, cfg.radius);
        } else {
            std::uniform_int_distribution<std::size_t> pick(0, dirs.size() - 1);
            std::uniform_real_distribution<double> along(-1.0, 1.0);
            const auto& v = dirs[pick(rng)];
            const double s = 0.5 * cfg.radius * along(rng);
            offset = ball_point(rng, d, 0.5 * cfg.radius);
            for (std::size_t i = 0; i < d; ++i) {
                offset[i] += s * v[i];
            }
        }

        Probe& probe = probes[k];
        probe.equilibrium = targets[t];
        probe.perturbation.resize(d);
        std::vector<double> z = eq.reduced;
        for (std::size_t i = 0; i < d; ++i) {
            probe.perturbation[i] = offset[i] * scale[i];
            z[i] += probe.perturbation[i];
        }
        State x0{0.0, std::vector<double>(model.dim())};
        model.from_reduced(z, x0.x);
        try {
            const auto traj = integrate(model, x0, integration);
            const auto r = steady_state_metrics(model, traj, metrics);
            probe.kind = r.kind;
            probe.tail_mean_velocities = r.tail_mean_velocities;
            probe.converged = matches(r, report);
        } catch (const Error& e) {
            probe.resolved = false;
            failures[k] = e.what();
        }
    });

    bool any = false;
    for (std::size_t k = 0; k < total; ++k) {
        if (!probes[k].resolved) {
            report.warnings.push_back("probe " + std::to_string(k) + " unresolved: " + failures[k]);
        }
        any = any || probes[k].converged;
    }
    report.probes = std::move(probes);
    report.classification = any ? Classification::self_excited : Classification::hidden;
    return report;
}

}  // namespace nsdyn
