#include "nsdyn/integrator.hpp"

#include "nsdyn/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace nsdyn {

void validate(const IntegrationConfig& cfg) {
    if (!(cfg.rel_tol > 0.0 && cfg.abs_tol > 0.0 && cfg.event_tol > 0.0 && cfg.stick_epsilon > 0.0)) {
        throw ConfigError("integration: tolerances must be positive");
    }
    if (!(cfg.max_step > 0.0)) {
        throw ConfigError("integration: max_step must be positive");
    }
    if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) {
        throw ConfigError("integration: t_end must be positive and finite");
    }
    if (!(cfg.output_step >= 0.0)) {
        throw ConfigError("integration: output_step must be non-negative");
    }
}

std::string_view to_string(EventKind k) noexcept {
    switch (k) {
        case EventKind::stick_onset:
            return "stick_onset";
        case EventKind::stick_release:
            return "stick_release";
        case EventKind::crossing:
            return "crossing";
    }
    return "crossing";
}

EventKind event_kind_from_string(std::string_view s) {
    if (s == "stick_onset") return EventKind::stick_onset;
    if (s == "stick_release") return EventKind::stick_release;
    if (s == "crossing") return EventKind::crossing;
    throw ConfigError("unknown event kind '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Trajectory

Trajectory::Trajectory(std::vector<std::string> labels) : labels_(std::move(labels)) {}

State Trajectory::back() const {
    if (empty()) {
        throw DomainError("trajectory is empty");
    }
    auto x = state(size() - 1);
    return {times_.back(), std::vector<double>(x.begin(), x.end())};
}

void Trajectory::append(double t, std::span<const double> x, std::uint32_t mask) {
    if (!times_.empty() && t == times_.back()) {
        std::copy(x.begin(), x.end(), coords_.end() - static_cast<std::ptrdiff_t>(dim()));
        masks_.back() = mask;
        return;
    }
    times_.push_back(t);
    coords_.insert(coords_.end(), x.begin(), x.end());
    masks_.push_back(mask);
}

void Trajectory::extend(const Trajectory& tail) {
    for (std::size_t i = 0; i < tail.size(); ++i) {
        append(tail.time(i), tail.state(i), tail.stuck_mask(i));
    }
    events_.insert(events_.end(), tail.events_.begin(), tail.events_.end());
    mode_history_.insert(mode_history_.end(), tail.mode_history_.begin(), tail.mode_history_.end());
    stats.accepted += tail.stats.accepted;
    stats.rejected += tail.stats.rejected;
    stats.rhs_evaluations += tail.stats.rhs_evaluations;
}

// ---------------------------------------------------------------------------
// Event resolution

EventDecision resolve_event(const SystemModel& model, std::span<const double> x, std::size_t surface) {
    const TorqueInterval hold = model.holding_interval(surface, x);
    const double balance = model.balance_torque(surface, x);
    return hold.strictly_contains(balance) ? EventDecision::slide : EventDecision::cross;
}

int departure_side(const SystemModel& model, std::span<const double> x, std::size_t surface) {
    const TorqueInterval hold = model.holding_interval(surface, x);
    const double balance = model.balance_torque(surface, x);
    if (balance >= hold.hi) {
        return 1;
    }
    if (balance <= hold.lo) {
        return -1;
    }
    // Inside the interval: leave toward the nearer boundary.
    return hold.hi - balance <= balance - hold.lo ? 1 : -1;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr std::array<double, 7> kErr{71.0 / 57600,  0.0, -71.0 / 16695, 71.0 / 1920,
                                     -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

// Continuous extension: b_j(theta) = sum_m P[j][m] theta^(m+1).
constexpr double kDense[7][4] = {
    {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0},
    {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0},
    {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0},
    {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0},
    {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0},
};

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr int kEventCheckpoints = 4;
constexpr int kMaxZeroProgressEvents = 8;

std::string describe_state(double t, std::span<const double> x, const std::vector<std::string>& labels) {
    std::ostringstream out;
    out.precision(17);
    out << "t=" << t << " state=(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << (i ? ", " : "") << labels[i] << '=' << x[i];
    }
    out << ')';
    return out.str();
}

class EventDrivenRun {
public:
    EventDrivenRun(const SystemModel& model, const IntegrationConfig& cfg)
        : model_(model),
          cfg_(cfg),
          n_(model.dim()),
          ns_(model.surfaces().size()),
          traj_(model.labels()),
          modes_(ns_, SurfaceMode::slip_positive),
          open_stick_(ns_),
          release_peak_(ns_, std::numeric_limits<double>::infinity()),
          last_event_t_(ns_, -std::numeric_limits<double>::infinity()),
          zero_progress_(ns_, 0),
          x_(n_),
          y_new_(n_),
          tmp_(n_),
          dense_(n_) {
        for (auto& k : k_) {
            k.assign(n_, 0.0);
        }
    }

    /// Sets the initial state and modes. When `forced_stick` names a surface,
    /// that surface starts stuck.
    void start(const State& x0, std::optional<std::size_t> forced_stick) {
        if (x0.size() != n_) {
            throw DomainError("integrate: initial state has " + std::to_string(x0.size()) + " coordinates, model '" +
                              std::string(model_.name()) + "' needs " + std::to_string(n_));
        }
        if (!all_finite(x0.x)) {
            throw DomainError("integrate: non-finite initial state");
        }
        t_ = x0.t;
        std::copy(x0.x.begin(), x0.x.end(), x_.begin());
        t_end_ = x0.t + cfg_.t_end;

        for (std::size_t i = 0; i < ns_; ++i) {
            const double g = model_.guard(i, x_);
            const bool on_surface = std::fabs(g) <= cfg_.event_tol || (forced_stick && *forced_stick == i);
            if (!on_surface) {
                modes_[i] = slip_mode(g > 0.0 ? 1 : -1);
                continue;
            }
            pin(i, x_);
            if (resolve_event(model_, x_, i) == EventDecision::slide) {
                enter_stick(i, t_);
            } else {
                if (forced_stick && *forced_stick == i) {
                    throw ContractViolation("integrate_sliding: balance torque is not strictly inside the holding "
                                            "interval of surface '" + model_.surfaces()[i].name + "'");
                }
                modes_[i] = slip_mode(departure_side(model_, x_, i));
                release_peak_[i] = 0.0;
            }
        }
        traj_.append(t_, x_, mask());
        t0_ = t_;
        next_output_index_ = 1;
    }

    /// Runs to t_end, or until `stop_on_release` is released.
    bool run(std::optional<std::size_t> stop_on_release) {
        eval(x_, k_[0]);
        double h = initial_step();
        bool last_rejected = false;
        std::size_t steps = 0;

        while (t_ < t_end_) {
            if (++steps > cfg_.max_steps) {
                throw IntegrationError("integrate: step budget exhausted at " + describe_state(t_, x_, model_.labels()));
            }
            const double remaining = t_end_ - t_;
            if (remaining <= 1e-13 * std::max(1.0, std::fabs(t_end_))) {
                break;
            }
            h = std::min({h, cfg_.max_step, remaining});
            const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t_));
            if (h < h_min) {
                throw IntegrationError("integrate: step size underflow at " + describe_state(t_, x_, model_.labels()));
            }

            const double err = attempt(h);
            if (!std::isfinite(err)) {
                ++traj_.stats.rejected;
                h *= 0.25;
                if (h < h_min) {
                    throw IntegrationError("integrate: non-finite derivative in coordinate '" +
                                           model_.labels()[nonfinite_coordinate()] + "' at " +
                                           describe_state(t_, x_, model_.labels()));
                }
                last_rejected = true;
                continue;
            }
            if (err > 1.0) {
                ++traj_.stats.rejected;
                h *= std::max(kMinFactor, kSafety * std::pow(err, -0.2));
                last_rejected = true;
                continue;
            }

            double factor = err == 0.0 ? kMaxFactor : std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, kMaxFactor);
            if (last_rejected) {
                factor = std::min(factor, 1.0);
            }
            last_rejected = false;
            ++traj_.stats.accepted;

            const auto hit = locate_event(h);
            if (!hit) {
                emit_outputs(t_ + h, h);
                const bool final_step = (t_end_ - (t_ + h)) <= 1e-13 * std::max(1.0, std::fabs(t_end_));
                t_ = final_step ? t_end_ : t_ + h;
                x_.swap(y_new_);
                k_[0].swap(k_[6]);
                track_release_growth();
                if (cfg_.output_step <= 0.0 || final_step) {
                    traj_.append(t_, x_, mask());
                }
                h *= factor;
                continue;
            }

            const double t_event = t_ + hit->theta * h;
            emit_outputs(t_event, h, /*exclusive_end=*/true);
            dense_at(hit->theta, h, x_);
            t_ = t_event;
            const bool released = handle_event(hit->surface);
            traj_.append(t_, x_, mask());
            eval(x_, k_[0]);
            if (released && stop_on_release && *stop_on_release == hit->surface) {
                close_open_intervals();
                return true;
            }
            h = std::max(h * std::min(factor, 1.0), 1e-3 * h);
        }
        close_open_intervals();
        return false;
    }

    Trajectory take() { return std::move(traj_); }
    State current() const { return {t_, x_}; }

private:
    struct Hit {
        double theta = 0.0;
        std::size_t surface = 0;
    };

    void eval(std::span<const double> x, std::span<double> dx) {
        model_.rhs(x, modes_, dx);
        ++traj_.stats.rhs_evaluations;
    }

    void pin(std::size_t i, std::span<double> x) const {
        const auto& s = model_.surfaces()[i];
        x[s.stuck_coordinate] = s.reference_velocity;
    }

    std::uint32_t mask() const {
        std::uint32_t m = 0;
        for (std::size_t i = 0; i < ns_; ++i) {
            if (modes_[i] == SurfaceMode::stick) {
                m |= 1u << i;
            }
        }
        return m;
    }

    double scale(double a, double b) const {
        return cfg_.abs_tol + cfg_.rel_tol * std::max(std::fabs(a), std::fabs(b));
    }

    double initial_step() {
        double d0 = 0.0;
        double d1 = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double sc = scale(x_[i], x_[i]);
            d0 += (x_[i] / sc) * (x_[i] / sc);
            d1 += (k_[0][i] / sc) * (k_[0][i] / sc);
        }
        d0 = std::sqrt(d0 / static_cast<double>(n_));
        d1 = std::sqrt(d1 / static_cast<double>(n_));
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, cfg_.max_step);

        for (std::size_t i = 0; i < n_; ++i) {
            tmp_[i] = x_[i] + h0 * k_[0][i];
        }
        eval(tmp_, k_[1]);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double sc = scale(x_[i], x_[i]);
            const double diff = (k_[1][i] - k_[0][i]) / sc;
            d2 += diff * diff;
        }
        d2 = std::sqrt(d2 / static_cast<double>(n_)) / h0;
        const double dmax = std::max(d1, d2);
        const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
        return std::min({100.0 * h0, h1, cfg_.max_step});
    }

    /// One Dormand-Prince step of size h from (t_, x_) using k_[0]. Returns
    /// the scaled error norm (NaN when a stage is non-finite).
    double attempt(double h) {
        auto stage = [&](std::size_t out, std::initializer_list<std::pair<std::size_t, double>> terms) {
            for (std::size_t i = 0; i < n_; ++i) {
                double acc = 0.0;
                for (const auto& [j, a] : terms) {
                    acc += a * k_[j][i];
                }
                tmp_[i] = x_[i] + h * acc;
            }
            eval(tmp_, k_[out]);
        };
        stage(1, {{0, a21}});
        stage(2, {{0, a31}, {1, a32}});
        stage(3, {{0, a41}, {1, a42}, {2, a43}});
        stage(4, {{0, a51}, {1, a52}, {2, a53}, {3, a54}});
        stage(5, {{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}});
        for (std::size_t i = 0; i < n_; ++i) {
            y_new_[i] = x_[i] + h * (b1 * k_[0][i] + b3 * k_[2][i] + b4 * k_[3][i] + b5 * k_[4][i] + b6 * k_[5][i]);
        }
        eval(y_new_, k_[6]);

        double sum = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double e = 0.0;
            for (std::size_t j = 0; j < 7; ++j) {
                e += kErr[j] * k_[j][i];
            }
            e *= h;
            const double sc = scale(x_[i], y_new_[i]);
            sum += (e / sc) * (e / sc);
        }
        const double err = std::sqrt(sum / static_cast<double>(n_));
        if (!std::isfinite(err) || !all_finite(y_new_)) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        return err;
    }

    std::size_t nonfinite_coordinate() const {
        for (const auto& k : k_) {
            for (std::size_t i = 0; i < n_; ++i) {
                if (!std::isfinite(k[i])) {
                    return i;
                }
            }
        }
        return 0;
    }

    void dense_at(double theta, double h, std::span<double> out) const {
        if (theta == 1.0) {
            std::copy(y_new_.begin(), y_new_.end(), out.begin());
            return;
        }
        std::array<double, 7> w{};
        for (std::size_t j = 0; j < 7; ++j) {
            double p = 0.0;
            double pw = theta;
            for (int m = 0; m < 4; ++m) {
                p += kDense[j][m] * pw;
                pw *= theta;
            }
            w[j] = p;
        }
        for (std::size_t i = 0; i < n_; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < 7; ++j) {
                acc += w[j] * k_[j][i];
            }
            out[i] = x_[i] + h * acc;
        }
    }

    /// Event function of surface i: positive away from an event.
    double event_value(std::size_t i, std::span<const double> x) const {
        if (modes_[i] == SurfaceMode::stick) {
            const TorqueInterval hold = model_.holding_interval(i, x);
            const double balance = model_.balance_torque(i, x);
            return std::min(hold.hi - balance, balance - hold.lo);
        }
        return side_of(modes_[i]) * model_.guard(i, x);
    }

    double event_value_at(std::size_t i, double theta, double h) {
        if (theta == 0.0) {
            return event_value(i, x_);
        }
        dense_at(theta, h, dense_);
        return event_value(i, dense_);
    }

    bool triggered(std::size_t i, double value, double start_value) const {
        if (modes_[i] == SurfaceMode::stick) {
            return value <= 0.0;
        }
        return value < 0.0 || (value == 0.0 && start_value > 0.0);
    }

    /// Earliest event inside the accepted step, if any.
    std::optional<Hit> locate_event(double h) {
        std::optional<Hit> best;
        for (std::size_t i = 0; i < ns_; ++i) {
            const double e0 = event_value(i, x_);
            if (modes_[i] == SurfaceMode::stick ? e0 <= 0.0 : e0 < 0.0) {
                // Already past the event at the start of the step.
                if (!best || best->theta > 0.0) {
                    best = Hit{0.0, i};
                }
                continue;
            }
            double lo = 0.0;
            double e_lo = e0;
            for (int j = 1; j <= kEventCheckpoints; ++j) {
                const double theta = static_cast<double>(j) / kEventCheckpoints;
                if (best && theta - 1.0 / kEventCheckpoints >= best->theta) {
                    break;
                }
                const double e = event_value_at(i, theta, h);
                if (triggered(i, e, e0)) {
                    const double root = refine(i, lo, e_lo, theta, e, h);
                    if (!best || root < best->theta) {
                        best = Hit{root, i};
                    }
                    break;
                }
                lo = theta;
                e_lo = e;
            }
        }
        return best;
    }

    /// Illinois iteration on [lo, hi] with e(lo) > 0 >= e(hi). Returns a theta
    /// at which the event has been reached (e <= 0) and |e| <= event_tol, or
    /// the right end of a bracket that can no longer shrink.
    double refine(std::size_t i, double lo, double e_lo, double hi, double e_hi, double h) {
        const double theta_tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t_)) / h;
        if (e_lo <= 0.0) {
            return lo;
        }
        int side = 0;
        for (int it = 0; it < 200; ++it) {
            if (std::fabs(e_hi) <= cfg_.event_tol || hi - lo <= theta_tol) {
                break;
            }
            double mid = (lo * e_hi - hi * e_lo) / (e_hi - e_lo);
            if (!(mid > lo && mid < hi)) {
                mid = 0.5 * (lo + hi);
            }
            const double e = event_value_at(i, mid, h);
            if (e > 0.0) {
                lo = mid;
                e_lo = e;
                if (side == -1) {
                    e_hi *= 0.5;
                }
                side = -1;
            } else {
                hi = mid;
                e_hi = e;
                if (side == 1) {
                    e_lo *= 0.5;
                }
                side = 1;
            }
        }
        return hi;
    }

    void emit_outputs(double t_stop, double h, bool exclusive_end = false) {
        if (cfg_.output_step <= 0.0) {
            return;
        }
        for (;;) {
            const double t_out = t0_ + static_cast<double>(next_output_index_) * cfg_.output_step;
            if (t_out > t_end_ || t_out > t_stop || (exclusive_end && t_out == t_stop)) {
                return;
            }
            dense_at((t_out - t_) / h, h, dense_);
            traj_.append(t_out, dense_, mask());
            ++next_output_index_;
        }
    }

    void track_release_growth() {
        for (std::size_t i = 0; i < ns_; ++i) {
            if (modes_[i] != SurfaceMode::stick && release_peak_[i] < cfg_.stick_epsilon) {
                release_peak_[i] = std::max(release_peak_[i], std::fabs(model_.guard(i, x_)));
            }
        }
    }

    void enter_stick(std::size_t i, double t) {
        modes_[i] = SurfaceMode::stick;
        open_stick_[i] = t;
    }

    void close_stick(std::size_t i, double t) {
        if (open_stick_[i]) {
            traj_.add_mode_interval({i, *open_stick_[i], t});
            open_stick_[i].reset();
        }
    }

    void close_open_intervals() {
        for (std::size_t i = 0; i < ns_; ++i) {
            close_stick(i, t_);
        }
    }

    /// Resolves the event of surface i at (t_, x_). Returns true on release.
    bool handle_event(std::size_t i) {
        if (t_ == last_event_t_[i]) {
            ++zero_progress_[i];
        } else {
            zero_progress_[i] = 0;
            last_event_t_[i] = t_;
        }

        if (modes_[i] == SurfaceMode::stick) {
            const int side = departure_side(model_, x_, i);
            close_stick(i, t_);
            modes_[i] = slip_mode(side);
            release_peak_[i] = 0.0;
            traj_.add_event({t_, EventKind::stick_release, i, x_});
            return true;
        }

        const std::vector<double> at_surface = x_;
        pin(i, x_);
        EventDecision decision = resolve_event(model_, x_, i);
        if (decision == EventDecision::cross) {
            const TorqueInterval hold = model_.holding_interval(i, x_);
            const bool admissible = hold.contains(model_.balance_torque(i, x_));
            const bool grazing = release_peak_[i] < cfg_.stick_epsilon || zero_progress_[i] >= kMaxZeroProgressEvents;
            if (admissible && grazing) {
                decision = EventDecision::slide;
            }
        }
        if (decision == EventDecision::slide) {
            enter_stick(i, t_);
            traj_.add_event({t_, EventKind::stick_onset, i, at_surface});
        } else {
            modes_[i] = slip_mode(departure_side(model_, x_, i));
            traj_.add_event({t_, EventKind::crossing, i, at_surface});
        }
        return false;
    }

    const SystemModel& model_;
    const IntegrationConfig& cfg_;
    std::size_t n_;
    std::size_t ns_;
    Trajectory traj_;
    std::vector<SurfaceMode> modes_;
    std::vector<std::optional<double>> open_stick_;
    std::vector<double> release_peak_;
    std::vector<double> last_event_t_;
    std::vector<int> zero_progress_;
    std::vector<double> x_;
    std::vector<double> y_new_;
    std::vector<double> tmp_;
    std::vector<double> dense_;
    std::array<std::vector<double>, 7> k_;
    double t_ = 0.0;
    double t_end_ = 0.0;
    double t0_ = 0.0;
    std::size_t next_output_index_ = 1;
};

}  // namespace

Trajectory integrate(const SystemModel& model, const State& x0, const IntegrationConfig& cfg) {
    validate(cfg);
    EventDrivenRun run(model, cfg);
    run.start(x0, std::nullopt);
    run.run(std::nullopt);
    return run.take();
}

SlidingSegment integrate_sliding(const SystemModel& model, const State& s, std::size_t surface,
                                 const IntegrationConfig& cfg) {
    validate(cfg);
    if (surface >= model.surfaces().size()) {
        throw DomainError("integrate_sliding: no surface " + std::to_string(surface));
    }
    EventDrivenRun run(model, cfg);
    run.start(s, surface);
    const bool released = run.run(surface);
    SlidingSegment out;
    out.release = run.current();
    out.released = released;
    out.segment = run.take();
    return out;
}

}  // namespace nsdyn
