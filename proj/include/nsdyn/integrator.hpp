#pragma once

#include "nsdyn/model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nsdyn {

struct IntegrationConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 0.1;       ///< [s]
    double event_tol = 1e-10;    ///< guard tolerance at located events (state units)
    double stick_epsilon = 1e-6; ///< [rad/s], see chattering suppression in integrate()
    double t_end = 100.0;        ///< [s]
    double output_step = 0.0;    ///< sampling interval [s]; 0 records every accepted step
    std::size_t max_steps = 200'000'000;

    friend bool operator==(const IntegrationConfig&, const IntegrationConfig&) = default;
};

void validate(const IntegrationConfig& cfg);

enum class EventKind { stick_onset, stick_release, crossing };

[[nodiscard]] std::string_view to_string(EventKind k) noexcept;
[[nodiscard]] EventKind event_kind_from_string(std::string_view s);

struct TrajectoryEvent {
    double t = 0.0;
    EventKind kind = EventKind::crossing;
    std::size_t surface = 0;
    std::vector<double> x;

    friend bool operator==(const TrajectoryEvent&, const TrajectoryEvent&) = default;
};

/// A closed interval of time during which `surface` was stuck.
struct ModeInterval {
    std::size_t surface = 0;
    double t_begin = 0.0;
    double t_end = 0.0;

    friend bool operator==(const ModeInterval&, const ModeInterval&) = default;
};

struct IntegrationStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
};

/// Time-stamped samples (flat storage), the event log and the stick history.
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::vector<std::string> labels);

    [[nodiscard]] std::size_t dim() const noexcept { return labels_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
    [[nodiscard]] bool empty() const noexcept { return times_.empty(); }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }

    [[nodiscard]] double time(std::size_t i) const noexcept { return times_[i]; }
    [[nodiscard]] std::span<const double> state(std::size_t i) const noexcept {
        return {coords_.data() + i * dim(), dim()};
    }
    /// Bit i set when surface i was stuck at sample i.
    [[nodiscard]] std::uint32_t stuck_mask(std::size_t i) const noexcept { return masks_[i]; }
    [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
    [[nodiscard]] State back() const;

    /// Appends a sample. A sample at the same time as the last one replaces it.
    void append(double t, std::span<const double> x, std::uint32_t mask);
    void add_event(TrajectoryEvent e) { events_.push_back(std::move(e)); }
    void add_mode_interval(ModeInterval m) { mode_history_.push_back(m); }

    [[nodiscard]] const std::vector<TrajectoryEvent>& events() const noexcept { return events_; }
    [[nodiscard]] const std::vector<ModeInterval>& mode_history() const noexcept { return mode_history_; }

    /// Appends another trajectory that starts where this one ends.
    void extend(const Trajectory& tail);

    IntegrationStats stats;

    friend bool operator==(const Trajectory& a, const Trajectory& b) {
        return a.labels_ == b.labels_ && a.times_ == b.times_ && a.coords_ == b.coords_ && a.masks_ == b.masks_ &&
               a.events_ == b.events_ && a.mode_history_ == b.mode_history_;
    }

private:
    std::vector<std::string> labels_;
    std::vector<double> times_;
    std::vector<double> coords_;
    std::vector<std::uint32_t> masks_;
    std::vector<TrajectoryEvent> events_;
    std::vector<ModeInterval> mode_history_;
};

enum class EventDecision { cross, slide };

/// Filippov test at a state on `surface`: slide iff the balance torque lies
/// strictly inside the holding interval. Endpoint ties cross.
[[nodiscard]] EventDecision resolve_event(const SystemModel& model, std::span<const double> x, std::size_t surface);

/// Direction a body leaves the surface after a cross decision.
[[nodiscard]] int departure_side(const SystemModel& model, std::span<const double> x, std::size_t surface);

/// Event-driven integration to cfg.t_end.
///
/// Between events the system is advanced with the Dormand-Prince 5(4) pair
/// under mixed absolute/relative error control. Each step is scanned for
/// sign changes of every active event function (sliding guards, or the
/// distance of the balance torque to the holding interval for stuck bodies)
/// using the 4th-order continuous extension; the earliest root is refined by
/// Illinois iteration and resolved before integration resumes.
///
/// A crossing that occurs before the body's speed has grown past
/// cfg.stick_epsilon since its last release re-enters sliding when the
/// balance torque is still admissible, which suppresses grazing loops.
///
/// Throws IntegrationError on step-size underflow or a non-finite
/// derivative; the message carries the time and state.
[[nodiscard]] Trajectory integrate(const SystemModel& model, const State& x0, const IntegrationConfig& cfg);

struct SlidingSegment {
    Trajectory segment;
    State release;        ///< state at release, or at t_end when still stuck
    bool released = false;
};

/// Integrates with `surface` stuck (its velocity pinned, friction equal to the
/// balance torque) until the balance torque reaches the holding-interval
/// boundary or cfg.t_end. Throws ContractViolation when resolve_event does
/// not return slide at `s`.
[[nodiscard]] SlidingSegment integrate_sliding(const SystemModel& model, const State& s, std::size_t surface,
                                               const IntegrationConfig& cfg);

}  // namespace nsdyn
