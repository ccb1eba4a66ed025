#pragma once

#include "nsdyn/model.hpp"

#include <cmath>
#include <memory>

// Small analytic systems for integrator and analysis tests.
namespace nsdyn::testing {

inline ParamTable empty_table() { return ParamTable(std::vector<ParamEntry>{}); }

/// x'' = -x.
class Harmonic final : public SystemModel {
public:
    Harmonic() : SystemModel({"x", "v"}, {}, {{"v", 1, 0.0}}, 0, 0, empty_table()) {}
    std::string_view name() const noexcept override { return "harmonic"; }
    TorqueInterval holding_interval(std::size_t, std::span<const double>) const override { return {}; }
    double balance_torque(std::size_t, std::span<const double>) const override { return 0.0; }
    double sliding_friction(std::size_t, std::span<const double>, int) const override { return 0.0; }
    void field(std::span<const double> x, std::span<const double>, std::span<double> dx) const override {
        dx[0] = x[1];
        dx[1] = -x[0];
    }
    std::vector<std::vector<double>> equilibrium_seeds() const override { return {{0.3, -0.2}}; }
};

/// x'' = -x - mu sign(x'), stick set [-mu, mu].
class Coulomb final : public SystemModel {
public:
    explicit Coulomb(double mu)
        : SystemModel({"x", "v"}, {{"slip", 1, 0.0, 1}}, {{"v", 1, 0.0}}, 0, 0, empty_table()), mu_(mu) {}
    std::string_view name() const noexcept override { return "coulomb"; }
    TorqueInterval holding_interval(std::size_t, std::span<const double>) const override { return {-mu_, mu_}; }
    double balance_torque(std::size_t, std::span<const double> x) const override { return -x[0]; }
    double sliding_friction(std::size_t, std::span<const double>, int side) const override { return side * mu_; }
    void field(std::span<const double> x, std::span<const double> f, std::span<double> dx) const override {
        dx[0] = x[1];
        dx[1] = -x[0] - f[0];
    }
    std::vector<std::vector<double>> equilibrium_seeds() const override { return {}; }

private:
    double mu_;
};

/// Hopf normal form with a stable unit circle around an unstable focus. The
/// reported velocity is x shifted by 5 so that tail means are well away from 0.
class HopfRotor final : public SystemModel {
public:
    HopfRotor() : SystemModel({"x", "y"}, {}, {{"x_shifted", 0, 5.0}}, 0, 0, empty_table()) {}
    std::string_view name() const noexcept override { return "hopf"; }
    TorqueInterval holding_interval(std::size_t, std::span<const double>) const override { return {}; }
    double balance_torque(std::size_t, std::span<const double>) const override { return 0.0; }
    double sliding_friction(std::size_t, std::span<const double>, int) const override { return 0.0; }
    void field(std::span<const double> z, std::span<const double>, std::span<double> dz) const override {
        const double r2 = z[0] * z[0] + z[1] * z[1];
        dz[0] = z[0] * (1.0 - r2) - z[1];
        dz[1] = z[1] * (1.0 - r2) + z[0];
    }
    std::vector<std::vector<double>> equilibrium_seeds() const override { return {{0.05, 0.02}}; }
};

/// x' = x^2, which blows up at t = 1/x0.
class Blowup final : public SystemModel {
public:
    Blowup() : SystemModel({"x"}, {}, {{"x", 0, 0.0}}, 0, 0, empty_table()) {}
    std::string_view name() const noexcept override { return "blowup"; }
    TorqueInterval holding_interval(std::size_t, std::span<const double>) const override { return {}; }
    double balance_torque(std::size_t, std::span<const double>) const override { return 0.0; }
    double sliding_friction(std::size_t, std::span<const double>, int) const override { return 0.0; }
    void field(std::span<const double> x, std::span<const double>, std::span<double> dx) const override {
        dx[0] = x[0] * x[0];
    }
    std::vector<std::vector<double>> equilibrium_seeds() const override { return {}; }
};

}  // namespace nsdyn::testing
