#pragma once

#include "nsdyn/integrator.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nsdyn {

enum class AttractorKind { equilibrium, limit_cycle, captured_rotation, unresolved };
enum class Classification { unclassified, hidden, self_excited, not_applicable };

[[nodiscard]] std::string_view to_string(AttractorKind k) noexcept;
[[nodiscard]] AttractorKind attractor_kind_from_string(std::string_view s);
[[nodiscard]] std::string_view to_string(Classification c) noexcept;
[[nodiscard]] Classification classification_from_string(std::string_view s);

/// One trajectory launched near an equilibrium by classify_attractor.
struct Probe {
    std::size_t equilibrium = 0;        ///< index into the equilibria list
    std::vector<double> perturbation;   ///< reduced-coordinate offset
    bool resolved = true;               ///< false when the integration failed
    bool converged = false;             ///< reached the classified attractor
    AttractorKind kind = AttractorKind::unresolved;
    std::vector<double> tail_mean_velocities;

    friend bool operator==(const Probe&, const Probe&) = default;
};

struct AttractorReport {
    AttractorKind kind = AttractorKind::unresolved;
    std::vector<std::string> velocity_labels;
    std::vector<double> tail_mean_velocities;  ///< per velocity channel [rad/s]
    double rotor_mean_velocity = 0.0;          ///< [rad/s]
    double amplitude = 0.0;                    ///< peak-to-peak of the oscillation coordinate
    std::optional<double> period;              ///< [s]
    double tail_begin = 0.0;
    double tail_end = 0.0;
    /// Peak-to-peak of every reduced coordinate over the tail.
    std::vector<double> tail_amplitudes;
    /// Stick intervals overlapping the tail, per surface.
    std::vector<std::size_t> tail_stick_intervals;
    Classification classification = Classification::unclassified;
    std::vector<Probe> probes;
    std::vector<std::string> warnings;

    friend bool operator==(const AttractorReport&, const AttractorReport&) = default;
};

struct MetricsConfig {
    double tail_fraction = 0.25;
    double min_tail = 10.0;          ///< [s]
    /// An equilibrium has tail velocity variance below (10 abs_tol)^2.
    double abs_tol = 1e-10;
    double period_cv = 0.01;         ///< coefficient-of-variation bound on peak intervals
    double captured_fraction = 0.5;  ///< captured when 0 < rotor mean < this * no-load speed

    friend bool operator==(const MetricsConfig&, const MetricsConfig&) = default;
};

/// Metrics with tolerances taken from the integration config.
[[nodiscard]] MetricsConfig metrics_config(const IntegrationConfig& cfg);

/// Classifies the last tail window of `traj`. The checks run in order:
/// equilibrium (velocity variance), captured rotation (rotor speed well below
/// the model's no-load speed), limit cycle (regular peaks of the oscillation
/// coordinate); anything else, or a window shorter than min_tail, is
/// unresolved. Classification is left unset.
[[nodiscard]] AttractorReport steady_state_metrics(const SystemModel& model, const Trajectory& traj,
                                                   const MetricsConfig& cfg = {});

/// Period from peaks of a sampled signal, or none when fewer than three
/// qualifying peaks exist or their spacing varies by more than `cv_limit`.
[[nodiscard]] std::optional<double> estimate_period(std::span<const double> t, std::span<const double> y,
                                                    double cv_limit = 0.01);

/// Same kind and every tail-mean velocity within 2%.
[[nodiscard]] bool matches(const AttractorReport& a, const AttractorReport& b);
[[nodiscard]] bool matches(AttractorKind kind, std::span<const double> means, const AttractorReport& b);

/// Captured over normal tail-mean rotor velocity. DomainError unless the
/// normal mean is positive.
[[nodiscard]] double sommerfeld_ratio(const AttractorReport& captured, const AttractorReport& normal);

}  // namespace nsdyn
