#include "catch_amalgamated.hpp"

#include "nsdyn/drill_dc.hpp"
#include "nsdyn/drill_induction.hpp"
#include "nsdyn/error.hpp"
#include "nsdyn/roots.hpp"
#include "nsdyn/tora.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace nsdyn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Closed-form T_cu and T_cl written out independently of the library.
double upper_oracle(double w) {
    const double s = w > 0 ? 1.0 : -1.0;
    return s * 0.37975 - 0.00575 + (s * 2.4245 - 0.0084) * w;
}

double lower_oracle(double w, double b_l) {
    return 0.05 + 0.21 * std::exp(-std::pow(w / 2.2, 1.5)) + b_l * w;
}

}  // namespace

TEST_CASE("tora acceleration at rest from an explicit 2x2 inverse", "[tora]") {
    const ToraParams p;
    const State s{0.0, {0.0, 0.0, 0.0, 0.0}};
    const auto d = tora_rhs(s, p);
    // [[M+m, ml], [ml, J]]^-1 applied to (0, u).
    const double a = 12.0, b = 0.06, c = 0.06, dd = 0.014;
    const double det = a * dd - b * c;
    CHECK_THAT(det, WithinAbs(0.1644, 1e-15));
    const double xdd = (dd * 0.0 - b * 0.48) / det;
    const double thdd = (-c * 0.0 + a * 0.48) / det;
    CHECK(d[0] == 0.0);
    CHECK(d[2] == 0.0);
    CHECK_THAT(d[1], WithinRel(xdd, 1e-14));
    CHECK_THAT(d[3], WithinRel(thdd, 1e-14));
    CHECK_THAT(d[3], WithinAbs(35.0365, 1e-4));
    // The diagonal approximation u/J is not the answer.
    CHECK(std::fabs(d[3] - 0.48 / 0.014) > 0.5);
}

TEST_CASE("tora at rest without torque has zero derivative", "[tora]") {
    ToraParams p;
    p.u = 0.0;
    const auto d = tora_rhs(State{0.0, {0.0, 0.0, 0.0, 0.0}}, p);
    for (double v : d) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("tora mass determinant stays in [0.1644, 0.168]", "[tora][property]") {
    const ToraParams p;
    for (int i = 0; i <= 720; ++i) {
        const double th = -2.0 * std::numbers::pi + i * std::numbers::pi / 180.0;
        const double det = tora_mass_determinant(th, p);
        CHECK(det >= 0.1644 - 1e-15);
        CHECK(det <= 0.168 + 1e-15);
    }
}

TEST_CASE("tora dynamics solve the mass-matrix system at random states", "[tora][property]") {
    const ToraParams p;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        const std::vector<double> x{0.05 * u(rng), u(rng), 3.0 * u(rng), 20.0 * u(rng)};
        const auto d = tora_rhs(State{0.0, x}, p);
        const double c = std::cos(x[2]);
        const double r1 = 1.5 * 0.04 * x[3] * x[3] * std::sin(x[2]) - 5.0 * x[1] - 5300.0 * x[0];
        const double r2 = 0.48 - 0.005 * x[3];
        CHECK_THAT(12.0 * d[1] + 0.06 * c * d[3], WithinAbs(r1, 1e-9 * (1.0 + std::fabs(r1))));
        CHECK_THAT(0.06 * c * d[1] + 0.014 * d[3], WithinAbs(r2, 1e-9 * (1.0 + std::fabs(r2))));
    }
}

TEST_CASE("tora energy is conserved by the unforced undamped field", "[tora][property]") {
    ToraParams p;
    p.u = 0.0;
    p.k1 = 0.0;
    p.k_theta = 0.0;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const std::vector<double> x{0.05 * u(rng), u(rng), 3.0 * u(rng), 10.0 * u(rng)};
        const auto d = tora_rhs(State{0.0, x}, p);
        // dE/dt by central differences along the flow.
        const double h = 1e-6;
        std::vector<double> xp(4), xm(4);
        for (int i = 0; i < 4; ++i) {
            xp[i] = x[i] + h * d[i];
            xm[i] = x[i] - h * d[i];
        }
        const double dE = (tora_energy(xp, p) - tora_energy(xm, p)) / (2.0 * h);
        CHECK(std::fabs(dE) < 1e-5 * (1.0 + tora_energy(x, p)));
    }
}

TEST_CASE("tora parameter invariants", "[tora]") {
    ToraParams p;
    p.J = 1e-5;
    CHECK_THROWS_AS(validate(p), ConfigError);
    p = {};
    p.k = -1.0;
    CHECK_THROWS_AS(validate(p), ConfigError);
    CHECK_THROWS_AS(tora_rhs(State{0.0, {0.0, 0.0}}, ToraParams{}), DomainError);
}

TEST_CASE("build_model registers dimensions and surfaces", "[models]") {
    const auto tora = build_model("tora");
    CHECK(tora->dim() == 4);
    CHECK(tora->surfaces().empty());
    const auto dc = build_model("drill_dc");
    CHECK(dc->dim() == 4);
    REQUIRE(dc->surfaces().size() == 2);
    CHECK(dc->labels()[dc->surfaces()[0].stuck_coordinate] == "omega_u");
    CHECK(dc->labels()[dc->surfaces()[1].stuck_coordinate] == "omega_l");
    const auto ind = build_model("drill_induction");
    CHECK(ind->dim() == 7);
    REQUIRE(ind->surfaces().size() == 1);
    CHECK(ind->surfaces()[0].reference_velocity == -8.0);
    CHECK_THROWS_AS(build_model("drill_ac"), ConfigError);
}

TEST_CASE("unknown model names get a suggestion", "[models]") {
    try {
        (void)build_model("drill-dc");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("drill_dc") != std::string::npos);
    }
}

TEST_CASE("guards vanish exactly at the reference velocity", "[models][property]") {
    for (const char* name : {"drill_dc", "drill_induction"}) {
        const auto m = build_model(name);
        for (std::size_t s = 0; s < m->surfaces().size(); ++s) {
            std::vector<double> x(m->dim(), 0.37);
            x[m->surfaces()[s].stuck_coordinate] = m->surfaces()[s].reference_velocity;
            CHECK(m->guard(s, x) == 0.0);
        }
    }
}

TEST_CASE("drill_dc co-rotation residual vanishes at the calibrated speed", "[drill_dc]") {
    const auto p = drill_dc_params(drill_dc_param_table());
    // Independent bisection on T_cu(w) + T_cl(w) = k_m v.
    auto f = [&](double w) { return upper_oracle(w) + lower_oracle(w, p.lower.b_l) - p.k_m * p.v; };
    double lo = 0.1, hi = 50.0;
    REQUIRE(f(lo) < 0.0);
    REQUIRE(f(hi) > 0.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    const double w = 0.5 * (lo + hi);
    CHECK_THAT(w, WithinAbs(kDrillDcNormalSpeed, 1e-9));
    const double alpha = lower_oracle(w, p.lower.b_l) / p.k_theta;
    const DrillDcBranch branch{upper_oracle(w), lower_oracle(w, p.lower.b_l)};
    const auto d = drill_dc_rhs(State{0.0, {alpha, w, w, 0.0}}, branch, p);
    CHECK(std::fabs(d[0]) < 1e-12);
    CHECK(std::fabs(d[1]) < 1e-10);
    CHECK(std::fabs(d[2]) < 1e-10);
    CHECK_THAT(d[3], WithinAbs(w, 1e-12));
}

TEST_CASE("drill_dc voltage calibration inverts the co-rotation equation", "[drill_dc]") {
    auto p = drill_dc_params(drill_dc_param_table());
    for (double speed : {2.0, 6.1, 9.5}) {
        const double v = calibrate_drill_dc_voltage(p, speed);
        CHECK_THAT(upper_oracle(speed) + lower_oracle(speed, p.lower.b_l), WithinAbs(p.k_m * v, 1e-10));
    }
    CHECK_THROWS_AS(calibrate_drill_dc_voltage(p, 0.0), DomainError);
}

TEST_CASE("drill_dc at rest without input has zero derivative", "[drill_dc]") {
    auto p = drill_dc_params(drill_dc_param_table());
    p.v = 0.0;
    const auto d = drill_dc_rhs(State{0.0, {0.0, 0.0, 0.0, 0.0}}, DrillDcBranch{0.0, 0.0}, p);
    for (double v : d) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("drill_dc rejects a branch outside the friction set", "[drill_dc]") {
    const auto p = drill_dc_params(drill_dc_param_table());
    CHECK_THROWS_AS(drill_dc_rhs(State{0.0, {0.0, 0.0, 0.0, 0.0}}, DrillDcBranch{0.0, 0.5}, p), ContractViolation);
    CHECK_THROWS_AS(drill_dc_rhs(State{0.0, {0.0, 1.0, 1.0, 0.0}}, DrillDcBranch{0.0, 0.0}, p), ContractViolation);
    CHECK_THROWS_AS(drill_dc_rhs(State{0.0, {0.0, 0.0}}, DrillDcBranch{}, p), DomainError);
}

TEST_CASE("drill_dc momentum balance with b = 0", "[drill_dc][property]") {
    auto p = drill_dc_params(drill_dc_param_table());
    p.b = 0.0;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int k = 0; k < 100; ++k) {
        const double wu = u(rng), wl = u(rng), alpha = u(rng) - 5.0;
        const DrillDcBranch br{friction_upper(wu, p.upper).lo, friction_lower(wl, p.lower).lo};
        const auto d = drill_dc_rhs(State{0.0, {alpha, wu, wl, 0.0}}, br, p);
        const double dL = p.J_u * d[1] + p.J_l * d[2];
        CHECK_THAT(dL, WithinAbs(p.k_m * p.v - br.upper - br.lower, 1e-12));
    }
}

TEST_CASE("drill_dc model friction follows the mode", "[drill_dc]") {
    const auto m = build_model("drill_dc");
    const std::vector<double> x{1.0, 0.0, 0.0, 0.0};
    const double bal = m->balance_torque(DrillDcModel::kLower, x);
    CHECK_THAT(bal, WithinAbs(0.075, 1e-15));
    CHECK(m->friction_torque(DrillDcModel::kLower, x, SurfaceMode::stick) == bal);
    std::vector<double> dx(4);
    const std::vector<SurfaceMode> modes{SurfaceMode::stick, SurfaceMode::stick};
    m->rhs(x, modes, dx);
    CHECK(dx[1] == 0.0);
    CHECK(dx[2] == 0.0);
}

TEST_CASE("drill_dc reduced coordinates round-trip", "[drill_dc]") {
    const auto m = build_model("drill_dc");
    CHECK(m->reduced_dim() == 3);
    const std::vector<double> x{0.3, 2.0, 5.0, 0.0};
    std::vector<double> z(3), back(4);
    m->to_reduced(x, z);
    m->from_reduced(z, back);
    CHECK(back == x);
}

TEST_CASE("default voltage and breakaway torque are marked calibrated", "[drill_dc][params]") {
    const auto t = default_params("drill_dc");
    CHECK(t.entry("v").provenance == Provenance::default_calibrated);
    CHECK(t.entry("T_0").provenance == Provenance::default_calibrated);
    CHECK(t.entry("k_m").provenance == Provenance::published);
    CHECK(t.get("T_0") == 0.26);
}

TEST_CASE("induction currents are quiet without rotor motion", "[drill_induction]") {
    const DrillInductionParams p;
    const auto d = drill_induction_rhs(State{0.0, {0.7, 0.0, 0.2, 1.0, 0.0, 0.0, 0.0}},
                                       friction_lower(1.0 + p.omega_field, p.lower).lo, p);
    CHECK(d[4] == 0.0);
    CHECK(d[5] == 0.0);
    CHECK(d[6] == 0.0);
}

TEST_CASE("induction model is symmetric under a phase rotation", "[drill_induction][property]") {
    const DrillInductionParams p;
    const double step = 2.0 * std::numbers::pi / 3.0;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const double th = 3.0 * u(rng), thl = th - 0.5 * u(rng);
        const double wl = 2.0 + u(rng);
        const std::vector<double> x{th, 3.0 * u(rng), thl, wl, u(rng), u(rng), u(rng)};
        // Both angles advanced by 2pi/3, currents shifted one phase back.
        const std::vector<double> y{th + step, x[1], thl + step, wl, x[5], x[6], x[4]};
        const double f = friction_lower(wl + p.omega_field, p.lower).lo;
        const auto dx = drill_induction_rhs(State{0.0, x}, f, p);
        const auto dy = drill_induction_rhs(State{0.0, y}, f, p);
        for (int i = 0; i < 4; ++i) {
            CHECK_THAT(dy[i], WithinAbs(dx[i], 1e-12));
        }
        CHECK_THAT(dy[4], WithinAbs(dx[5], 1e-12));
        CHECK_THAT(dy[5], WithinAbs(dx[6], 1e-12));
        CHECK_THAT(dy[6], WithinAbs(dx[4], 1e-12));
    }
}

TEST_CASE("induction currents decay at rate c with the rotor frozen", "[drill_induction]") {
    const DrillInductionParams p;
    const std::vector<double> x{0.4, 0.0, 0.4, 1.0, 0.3, -0.2, 0.7};
    const auto d = drill_induction_rhs(State{0.0, x}, friction_lower(1.0 + p.omega_field, p.lower).lo, p);
    for (int k = 0; k < 3; ++k) {
        CHECK_THAT(d[4 + k], WithinAbs(-p.c * x[4 + k], 1e-14));
    }
}

TEST_CASE("induction friction is evaluated in the ground frame", "[drill_induction]") {
    const DrillInductionParams p;
    const std::vector<double> at_rest{0.0, 0.0, 0.0, -p.omega_field, 0.0, 0.0, 0.0};
    CHECK_NOTHROW(drill_induction_rhs(State{0.0, at_rest}, 0.2, p));
    CHECK_THROWS_AS(drill_induction_rhs(State{0.0, at_rest}, 0.3, p), ContractViolation);
}

TEST_CASE("induction reduced field matches the full field", "[drill_induction][property]") {
    const auto m = build_model("drill_induction");
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 30; ++k) {
        const std::vector<double> x{3.0 * u(rng), 4.0 * u(rng), u(rng), 2.0 + u(rng), u(rng), u(rng), u(rng)};
        const std::vector<double> f{0.1 * u(rng)};
        std::vector<double> dx(7), z(6), dz(6);
        m->field(x, f, dx);
        m->to_reduced(x, z);
        m->reduced_field(z, f, dz);
        // d/dt to_reduced(x) along the full field, by central differences.
        const double h = 1e-6;
        std::vector<double> xp(7), xm(7), zp(6), zm(6);
        for (int i = 0; i < 7; ++i) {
            xp[i] = x[i] + h * dx[i];
            xm[i] = x[i] - h * dx[i];
        }
        m->to_reduced(xp, zp);
        m->to_reduced(xm, zm);
        for (int i = 0; i < 6; ++i) {
            CHECK_THAT(dz[i], WithinAbs((zp[i] - zm[i]) / (2.0 * h), 1e-6));
        }
    }
}

TEST_CASE("induction steady torque matches settled currents", "[drill_induction]") {
    const DrillInductionParams p;
    for (double slip : {-8.0, -1.0, 0.5, 3.0}) {
        // Settled currents for constant slip w: i_q = -a w c / (c^2 + w^2).
        const double iq = -p.a * slip * p.c / (p.c * p.c + slip * slip);
        CHECK_THAT(induction_steady_torque(slip, p), WithinAbs(1.5 * p.a * iq, 1e-14));
    }
    CHECK(induction_steady_torque(0.0, p) == 0.0);
}
