#include "nsdyn/metrics.hpp"

#include "nsdyn/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsdyn {

std::string_view to_string(AttractorKind k) noexcept {
    switch (k) {
        case AttractorKind::equilibrium:
            return "equilibrium";
        case AttractorKind::limit_cycle:
            return "limit_cycle";
        case AttractorKind::captured_rotation:
            return "captured_rotation";
        case AttractorKind::unresolved:
            return "unresolved";
    }
    return "unresolved";
}

AttractorKind attractor_kind_from_string(std::string_view s) {
    if (s == "equilibrium") return AttractorKind::equilibrium;
    if (s == "limit_cycle") return AttractorKind::limit_cycle;
    if (s == "captured_rotation") return AttractorKind::captured_rotation;
    if (s == "unresolved") return AttractorKind::unresolved;
    throw ConfigError("unknown attractor kind '" + std::string(s) + "'");
}

std::string_view to_string(Classification c) noexcept {
    switch (c) {
        case Classification::unclassified:
            return "unclassified";
        case Classification::hidden:
            return "hidden";
        case Classification::self_excited:
            return "self_excited";
        case Classification::not_applicable:
            return "not_applicable";
    }
    return "unclassified";
}

Classification classification_from_string(std::string_view s) {
    if (s == "unclassified") return Classification::unclassified;
    if (s == "hidden") return Classification::hidden;
    if (s == "self_excited") return Classification::self_excited;
    if (s == "not_applicable") return Classification::not_applicable;
    throw ConfigError("unknown classification '" + std::string(s) + "'");
}

MetricsConfig metrics_config(const IntegrationConfig& cfg) {
    MetricsConfig m;
    m.abs_tol = cfg.abs_tol;
    return m;
}

namespace {

/// Time-weighted mean and variance by the trapezoid rule.
struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

template <typename Value>
Moments moments(std::span<const double> t, Value value) {
    const std::size_t n = t.size();
    const double span = t[n - 1] - t[0];
    if (span <= 0.0) {
        return {value(0), 0.0};
    }
    double integral = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        integral += 0.5 * (value(i) + value(i - 1)) * (t[i] - t[i - 1]);
    }
    const double mean = integral / span;
    double sq = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double a = value(i) - mean;
        const double b = value(i - 1) - mean;
        sq += 0.5 * (a * a + b * b) * (t[i] - t[i - 1]);
    }
    return {mean, sq / span};
}

/// Vertex time of the parabola through three samples around a peak.
double refine_peak(double t0, double y0, double t1, double y1, double t2, double y2) {
    const double d0 = t0 - t1;
    const double d2 = t2 - t1;
    const double s0 = (y0 - y1) / d0;
    const double s2 = (y2 - y1) / d2;
    const double curvature = (s2 - s0) / (d2 - d0);
    if (!(curvature < 0.0)) {
        return t1;
    }
    const double slope = s0 - curvature * d0;
    const double offset = -slope / (2.0 * curvature);
    return t1 + std::clamp(offset, d0, d2);
}

}  // namespace

std::optional<double> estimate_period(std::span<const double> t, std::span<const double> y, double cv_limit) {
    if (t.size() < 3) {
        return std::nullopt;
    }
    const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi - lo > 1e-12 * std::max(1.0, std::fabs(hi)))) {
        return std::nullopt;
    }
    // Only maxima in the upper half of the range count, so ripples on a
    // stick plateau or a slow shoulder do not split a period.
    const double level = lo + 0.5 * (hi - lo);
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        if (y[i] > level && y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            peaks.push_back(refine_peak(t[i - 1], y[i - 1], t[i], y[i], t[i + 1], y[i + 1]));
        }
    }
    if (peaks.size() < 3) {
        return std::nullopt;
    }
    const std::size_t m = peaks.size() - 1;
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mean += peaks[i + 1] - peaks[i];
    }
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double d = peaks[i + 1] - peaks[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(m);
    if (!(mean > 0.0) || std::sqrt(var) / mean >= cv_limit) {
        return std::nullopt;
    }
    return mean;
}

AttractorReport steady_state_metrics(const SystemModel& model, const Trajectory& traj, const MetricsConfig& cfg) {
    AttractorReport r;
    for (const auto& ch : model.velocity_channels()) {
        r.velocity_labels.push_back(ch.label);
    }
    r.tail_mean_velocities.assign(model.velocity_channels().size(), 0.0);
    r.tail_amplitudes.assign(model.reduced_dim(), 0.0);
    r.tail_stick_intervals.assign(model.surfaces().size(), 0);
    if (traj.size() < 2) {
        r.warnings.push_back("trajectory has fewer than two samples");
        return r;
    }

    const double t_first = traj.time(0);
    const double t_last = traj.time(traj.size() - 1);
    const double tail = std::max(cfg.tail_fraction * (t_last - t_first), cfg.min_tail);
    r.tail_end = t_last;
    r.tail_begin = t_last - tail;
    if (r.tail_begin < t_first) {
        r.tail_begin = t_first;
        r.warnings.push_back("tail window shorter than " + std::to_string(cfg.min_tail) + " s");
        return r;
    }

    const auto& times = traj.times();
    const std::size_t first = static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), r.tail_begin) - times.begin());
    const std::size_t n = traj.size() - first;
    if (n < 2) {
        r.warnings.push_back("tail window holds fewer than two samples");
        return r;
    }
    const std::span<const double> t(times.data() + first, n);

    bool at_rest = true;
    for (std::size_t c = 0; c < model.velocity_channels().size(); ++c) {
        const auto& ch = model.velocity_channels()[c];
        const auto m = moments(t, [&](std::size_t i) { return traj.state(first + i)[ch.coordinate] + ch.offset; });
        r.tail_mean_velocities[c] = m.mean;
        const double bound = 10.0 * cfg.abs_tol;
        at_rest = at_rest && m.variance < bound * bound;
    }
    r.rotor_mean_velocity = r.tail_mean_velocities.empty() ? 0.0 : r.tail_mean_velocities[model.rotor_channel()];

    std::vector<double> osc(n);
    std::vector<double> z(model.reduced_dim());
    std::vector<double> z_lo(model.reduced_dim(), std::numeric_limits<double>::infinity());
    std::vector<double> z_hi(model.reduced_dim(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = traj.state(first + i);
        osc[i] = x[model.oscillation_coordinate()];
        model.to_reduced(x, z);
        for (std::size_t k = 0; k < z.size(); ++k) {
            z_lo[k] = std::min(z_lo[k], z[k]);
            z_hi[k] = std::max(z_hi[k], z[k]);
        }
    }
    for (std::size_t k = 0; k < z.size(); ++k) {
        r.tail_amplitudes[k] = z_hi[k] - z_lo[k];
    }
    const auto [lo, hi] = std::minmax_element(osc.begin(), osc.end());
    r.amplitude = *hi - *lo;

    for (const auto& interval : traj.mode_history()) {
        if (interval.t_end > r.tail_begin) {
            ++r.tail_stick_intervals[interval.surface];
        }
    }

    if (at_rest) {
        r.kind = AttractorKind::equilibrium;
        return r;
    }
    r.period = estimate_period(t, osc, cfg.period_cv);
    const auto no_load = model.no_load_velocity();
    if (no_load && r.rotor_mean_velocity > 0.0 && r.rotor_mean_velocity < cfg.captured_fraction * *no_load) {
        r.kind = AttractorKind::captured_rotation;
    } else if (r.period) {
        r.kind = AttractorKind::limit_cycle;
    } else {
        r.warnings.push_back("tail is neither at rest nor periodic");
    }
    return r;
}

bool matches(AttractorKind kind, std::span<const double> means, const AttractorReport& b) {
    if (kind != b.kind || means.size() != b.tail_mean_velocities.size()) {
        return false;
    }
    for (std::size_t i = 0; i < means.size(); ++i) {
        const double x = means[i];
        const double y = b.tail_mean_velocities[i];
        if (!(std::fabs(x - y) <= 0.02 * std::max(std::fabs(x), std::fabs(y)) + 1e-9)) {
            return false;
        }
    }
    return true;
}

bool matches(const AttractorReport& a, const AttractorReport& b) {
    return matches(a.kind, a.tail_mean_velocities, b);
}

double sommerfeld_ratio(const AttractorReport& captured, const AttractorReport& normal) {
    if (!(normal.rotor_mean_velocity > 0.0)) {
        throw DomainError("sommerfeld_ratio: normal rotor mean velocity must be positive, got " +
                          std::to_string(normal.rotor_mean_velocity));
    }
    return captured.rotor_mean_velocity / normal.rotor_mean_velocity;
}

}  // namespace nsdyn
