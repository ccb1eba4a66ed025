#include "catch_amalgamated.hpp"

#include "fixtures.hpp"

#include "nsdyn/drill_dc.hpp"
#include "nsdyn/drill_induction.hpp"
#include "nsdyn/error.hpp"
#include "nsdyn/integrator.hpp"

#include <array>
#include <cmath>
#include <numbers>

using namespace nsdyn;
using namespace nsdyn::testing;
using Catch::Matchers::WithinAbs;

namespace {

IntegrationConfig horizon(double t_end) {
    IntegrationConfig cfg;
    cfg.t_end = t_end;
    return cfg;
}

ParamTable dc_table_with_voltage(double v) {
    auto t = default_params("drill_dc");
    t.set("v", v);
    return t;
}

void check_sliding_soundness(const SystemModel& m, const Trajectory& traj, double event_tol) {
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto x = traj.state(k);
        for (std::size_t s = 0; s < m.surfaces().size(); ++s) {
            if (traj.stuck_mask(k) & (1u << s)) {
                CHECK(std::fabs(m.guard(s, x)) <= event_tol);
                CHECK(m.holding_interval(s, x).contains(m.balance_torque(s, x)));
            }
        }
    }
}

}  // namespace

TEST_CASE("harmonic oscillator returns to its start after one period", "[integrate]") {
    const Harmonic m;
    auto cfg = horizon(2.0 * std::numbers::pi);
    const auto traj = integrate(m, State{0.0, {1.0, 0.0}}, cfg);
    const auto end = traj.back();
    CHECK_THAT(end.t, WithinAbs(2.0 * std::numbers::pi, 1e-12));
    CHECK(std::fabs(end.x[0] - 1.0) < 10.0 * cfg.rel_tol);
    CHECK(std::fabs(end.x[1]) < 10.0 * cfg.rel_tol);
    CHECK(traj.events().empty());
}

TEST_CASE("dense output on a uniform grid tracks the exact solution", "[integrate]") {
    const Harmonic m;
    auto cfg = horizon(20.0);
    cfg.output_step = 0.01;
    const auto traj = integrate(m, State{0.0, {1.0, 0.0}}, cfg);
    REQUIRE(traj.size() == 2001);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK_THAT(traj.time(k), WithinAbs(0.01 * static_cast<double>(k), 1e-9));
        worst = std::max(worst, std::fabs(traj.state(k)[0] - std::cos(traj.time(k))));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("sample times strictly increase", "[integrate][property]") {
    const auto m = build_model("drill_dc");
    for (double step : {0.0, 0.05}) {
        auto cfg = horizon(40.0);
        cfg.output_step = step;
        const auto traj = integrate(*m, State{0.0, {0.0, 0.0, 0.0, 0.0}}, cfg);
        for (std::size_t k = 1; k < traj.size(); ++k) {
            REQUIRE(traj.time(k) > traj.time(k - 1));
        }
        CHECK(traj.back().t == 40.0);
    }
}

TEST_CASE("Coulomb oscillator sticks where the closed-form solution does", "[integrate][events]") {
    // From x = 3.5 at rest with mu = 1: half-cycles about x = +1 then x = -1,
    // amplitude 2.5 then 0.5, so the mass stops at t = 2 pi, x = -0.5, inside [-1, 1].
    const Coulomb m(1.0);
    const auto traj = integrate(m, State{0.0, {3.5, 0.0}}, horizon(10.0));
    const auto& ev = traj.events();
    REQUIRE(ev.size() >= 2);
    CHECK(ev[0].kind == EventKind::crossing);
    CHECK_THAT(ev[0].t, WithinAbs(std::numbers::pi, 1e-7));
    CHECK_THAT(ev[0].x[0], WithinAbs(-1.5, 1e-7));
    CHECK(ev[1].kind == EventKind::stick_onset);
    CHECK_THAT(ev[1].t, WithinAbs(2.0 * std::numbers::pi, 1e-7));
    CHECK_THAT(ev[1].x[0], WithinAbs(-0.5, 1e-7));
    CHECK(ev.size() == 2);
    CHECK_THAT(traj.back().x[0], WithinAbs(-0.5, 1e-7));
    CHECK(traj.back().x[1] == 0.0);
    REQUIRE(traj.mode_history().size() == 1);
    CHECK(traj.mode_history()[0].t_end == 10.0);
}

TEST_CASE("Coulomb oscillator released inside the stick band stays put", "[integrate][events]") {
    const Coulomb m(1.0);
    const auto traj = integrate(m, State{0.0, {0.5, 0.0}}, horizon(5.0));
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK(traj.state(k)[0] == 0.5);
        CHECK(traj.state(k)[1] == 0.0);
        CHECK(traj.stuck_mask(k) == 1u);
    }
    REQUIRE(traj.mode_history().size() == 1);
    CHECK(traj.mode_history()[0].t_begin == 0.0);
}

TEST_CASE("located events lie on the surface", "[integrate][events][property]") {
    const auto m = build_model("drill_dc");
    IntegrationConfig cfg = horizon(100.0);
    const auto traj = integrate(*m, State{0.0, {0.0, 0.0, 0.0, 0.0}}, cfg);
    REQUIRE_FALSE(traj.events().empty());
    for (const auto& e : traj.events()) {
        if (e.kind != EventKind::stick_release) {
            CHECK(std::fabs(m->guard(e.surface, e.x)) <= cfg.event_tol);
        } else {
            const auto hold = m->holding_interval(e.surface, e.x);
            const double bal = m->balance_torque(e.surface, e.x);
            const double gap = std::min(std::fabs(bal - hold.lo), std::fabs(bal - hold.hi));
            CHECK(gap <= 1e-8);
        }
    }
    check_sliding_soundness(*m, traj, cfg.event_tol);
}

TEST_CASE("drill from rest sticks on the lower disc within 100 s", "[integrate][drill_dc]") {
    const auto m = build_model("drill_dc");
    const auto traj = integrate(*m, State{0.0, {0.0, 0.0, 0.0, 0.0}}, horizon(100.0));
    bool found = false;
    for (const auto& e : traj.events()) {
        found = found || (e.kind == EventKind::stick_onset && e.surface == DrillDcModel::kLower && e.t <= 100.0);
    }
    CHECK(found);
}

TEST_CASE("stick intervals keep the lower disc pinned and held", "[integrate][drill_dc][property]") {
    const auto m = build_model("drill_dc");
    IntegrationConfig cfg = horizon(60.0);
    cfg.output_step = 0.01;
    const auto traj = integrate(*m, State{0.0, {0.0, 0.0, 0.0, 0.0}}, cfg);
    std::size_t stuck_samples = 0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        stuck_samples += (traj.stuck_mask(k) >> DrillDcModel::kLower) & 1u;
    }
    CHECK(stuck_samples > 100);
    check_sliding_soundness(*m, traj, cfg.event_tol);
    for (const auto& iv : traj.mode_history()) {
        CHECK(iv.t_end >= iv.t_begin);
    }
}

TEST_CASE("resolve_event applies the strict Filippov test", "[resolve_event]") {
    const auto m = build_model("drill_dc");
    const double k = 0.075;
    CHECK(resolve_event(*m, std::vector<double>{1.0, 0.0, 0.0, 0.0}, DrillDcModel::kLower) == EventDecision::slide);
    CHECK(resolve_event(*m, std::vector<double>{4.0, 0.0, 0.0, 0.0}, DrillDcModel::kLower) == EventDecision::cross);
    CHECK(resolve_event(*m, std::vector<double>{-4.0, 0.0, 0.0, 0.0}, DrillDcModel::kLower) == EventDecision::cross);

    // Exact tie: adjust alpha until k alpha rounds to T_0 itself.
    double alpha = 0.26 / k;
    for (int i = 0; i < 64 && k * alpha != 0.26; ++i) {
        alpha = std::nextafter(alpha, k * alpha < 0.26 ? 10.0 : 0.0);
    }
    REQUIRE(k * alpha == 0.26);
    const std::vector<double> tie{alpha, 0.0, 0.0, 0.0};
    REQUIRE(m->balance_torque(DrillDcModel::kLower, tie) == 0.26);
    CHECK(resolve_event(*m, tie, DrillDcModel::kLower) == EventDecision::cross);
    CHECK(departure_side(*m, tie, DrillDcModel::kLower) == 1);
    CHECK(departure_side(*m, std::vector<double>{-4.0, 0.0, 0.0, 0.0}, DrillDcModel::kLower) == -1);
}

TEST_CASE("both discs stay stuck without input", "[integrate_sliding]") {
    const auto m = build_model("drill_dc", dc_table_with_voltage(0.0));
    const auto seg = integrate_sliding(*m, State{0.0, {0.5, 0.0, 0.0, 0.0}}, DrillDcModel::kLower, horizon(50.0));
    CHECK_FALSE(seg.released);
    CHECK(seg.release.t == 50.0);
    for (std::size_t k = 0; k < seg.segment.size(); ++k) {
        const auto x = seg.segment.state(k);
        CHECK(x[0] == 0.5);
        CHECK(x[1] == 0.0);
        CHECK(x[2] == 0.0);
    }
}

TEST_CASE("sliding release time matches a fixed-step oracle", "[integrate_sliding]") {
    const auto m = build_model("drill_dc");
    const auto p = drill_dc_params(m->params());
    const auto seg = integrate_sliding(*m, State{0.0, {0.0, 6.0, 0.0, 0.0}}, DrillDcModel::kLower, horizon(20.0));
    REQUIRE(seg.released);

    // RK4 on (alpha, omega_u) with the lower disc pinned, stopped where
    // k_theta alpha reaches T_0.
    auto f = [&](const std::array<double, 2>& y) {
        const double wu = y[1];
        const double tfu = (wu > 0 ? 0.37975 : -0.37975) - 0.00575 + ((wu > 0 ? 2.4245 : -2.4245) - 0.0084) * wu;
        return std::array<double, 2>{wu, (p.k_m * p.v - p.k_theta * y[0] - tfu) / p.J_u};
    };
    const double h = 1e-5;
    const double target = p.lower.T_0 / p.k_theta;
    std::array<double, 2> y{0.0, 6.0};
    double t = 0.0;
    while (true) {
        auto add = [](const std::array<double, 2>& a, const std::array<double, 2>& b, double s) {
            return std::array<double, 2>{a[0] + s * b[0], a[1] + s * b[1]};
        };
        const auto k1 = f(y);
        const auto k2 = f(add(y, k1, h / 2));
        const auto k3 = f(add(y, k2, h / 2));
        const auto k4 = f(add(y, k3, h));
        std::array<double, 2> next{};
        for (int i = 0; i < 2; ++i) {
            next[i] = y[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        }
        if (next[0] >= target) {
            t += h * (target - y[0]) / (next[0] - y[0]);
            break;
        }
        y = next;
        t += h;
    }
    CHECK_THAT(seg.release.t, WithinAbs(t, 1e-7));
    CHECK_THAT(seg.release.x[0], WithinAbs(target, 1e-8));
    CHECK(seg.release.x[2] == 0.0);
    REQUIRE_FALSE(seg.segment.events().empty());
    CHECK(seg.segment.events().back().kind == EventKind::stick_release);
}

TEST_CASE("sliding requires a state the surface can hold", "[integrate_sliding]") {
    const auto m = build_model("drill_dc");
    CHECK_THROWS_AS(integrate_sliding(*m, State{0.0, {5.0, 0.0, 0.0, 0.0}}, DrillDcModel::kLower, horizon(1.0)),
                    ContractViolation);
    CHECK_THROWS_AS(integrate_sliding(*m, State{0.0, {0.0, 0.0, 0.0, 0.0}}, 7, horizon(1.0)), DomainError);
}

TEST_CASE("sliding pins the induction lower disc at ground rest", "[integrate_sliding][drill_induction]") {
    const auto m = build_model("drill_induction");
    const double rest = -m->params().get("omega_field");
    const auto seg =
        integrate_sliding(*m, State{0.0, {0.0, rest, 0.0, rest, 0.0, 0.0, 0.0}}, DrillInductionModel::kLower,
                          horizon(3.0));
    for (std::size_t k = 0; k < seg.segment.size(); ++k) {
        if (seg.segment.stuck_mask(k) & 1u) {
            CHECK(seg.segment.state(k)[3] == rest);
        }
    }
    CHECK(seg.segment.stuck_mask(0) == 1u);
}

TEST_CASE("integration is deterministic", "[integrate][property]") {
    const auto m = build_model("drill_dc");
    const auto a = integrate(*m, State{0.0, {0.0, 0.0, 0.0, 0.0}}, horizon(30.0));
    const auto b = integrate(*m, State{0.0, {0.0, 0.0, 0.0, 0.0}}, horizon(30.0));
    CHECK(a == b);
}

TEST_CASE("integration errors are reported", "[integrate][errors]") {
    const Blowup m;
    try {
        (void)integrate(m, State{0.0, {1.0}}, horizon(2.0));
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(std::string(e.what()).find("x") != std::string::npos);
    }
    const Harmonic h;
    CHECK_THROWS_AS(integrate(h, State{0.0, {1.0}}, horizon(1.0)), DomainError);
    CHECK_THROWS_AS(integrate(h, State{0.0, {std::nan(""), 0.0}}, horizon(1.0)), DomainError);
    IntegrationConfig bad;
    bad.rel_tol = 0.0;
    CHECK_THROWS_AS(integrate(h, State{0.0, {1.0, 0.0}}, bad), ConfigError);
}

TEST_CASE("trajectory append replaces a sample at the same time", "[trajectory]") {
    Trajectory t({"a"});
    t.append(0.0, std::vector<double>{1.0}, 0);
    t.append(1.0, std::vector<double>{2.0}, 0);
    t.append(1.0, std::vector<double>{3.0}, 1);
    REQUIRE(t.size() == 2);
    CHECK(t.state(1)[0] == 3.0);
    CHECK(t.stuck_mask(1) == 1u);
    Trajectory tail({"a"});
    tail.append(1.0, std::vector<double>{3.0}, 1);
    tail.append(2.0, std::vector<double>{4.0}, 0);
    t.extend(tail);
    CHECK(t.size() == 3);
    CHECK(t.back().x[0] == 4.0);
    CHECK_THROWS_AS(Trajectory({"a"}).back(), DomainError);
}

TEST_CASE("event kinds round-trip through their names", "[trajectory]") {
    for (auto k : {EventKind::stick_onset, EventKind::stick_release, EventKind::crossing}) {
        CHECK(event_kind_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS(event_kind_from_string("slip"), ConfigError);
}
