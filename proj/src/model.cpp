#include "nsdyn/model.hpp"

#include "nsdyn/error.hpp"

#include <algorithm>
#include <array>

namespace nsdyn {

namespace {
constexpr std::size_t kMaxSurfaces = 8;
}

SystemModel::SystemModel(std::vector<std::string> labels, std::vector<SwitchingSurface> surfaces,
                         std::vector<VelocityChannel> channels, std::size_t rotor_channel,
                         std::size_t oscillation_coordinate, ParamTable params)
    : labels_(std::move(labels)),
      surfaces_(std::move(surfaces)),
      channels_(std::move(channels)),
      rotor_channel_(rotor_channel),
      oscillation_coordinate_(oscillation_coordinate),
      params_(std::move(params)) {
    if (surfaces_.size() > kMaxSurfaces) {
        throw ConfigError("too many switching surfaces");
    }
}

std::optional<std::size_t> SystemModel::coordinate_index(std::string_view label) const noexcept {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

double SystemModel::friction_torque(std::size_t surface, std::span<const double> x, SurfaceMode mode) const {
    if (mode == SurfaceMode::stick) {
        return balance_torque(surface, x);
    }
    return sliding_friction(surface, x, side_of(mode));
}

void SystemModel::rhs(std::span<const double> x, std::span<const SurfaceMode> modes, std::span<double> dxdt) const {
    std::array<double, kMaxSurfaces> friction{};
    for (std::size_t i = 0; i < surfaces_.size(); ++i) {
        friction[i] = friction_torque(i, x, modes[i]);
    }
    field(x, std::span<const double>(friction.data(), surfaces_.size()), dxdt);
    for (std::size_t i = 0; i < surfaces_.size(); ++i) {
        if (modes[i] == SurfaceMode::stick) {
            dxdt[surfaces_[i].stuck_coordinate] = 0.0;
        }
    }
}

std::vector<SurfaceMode> SystemModel::modes_from_signs(std::span<const double> x) const {
    std::vector<SurfaceMode> modes(surfaces_.size());
    for (std::size_t i = 0; i < surfaces_.size(); ++i) {
        modes[i] = slip_mode(guard(i, x) >= 0.0 ? 1 : -1);
    }
    return modes;
}

void SystemModel::to_reduced(std::span<const double> x, std::span<double> z) const {
    std::copy(x.begin(), x.end(), z.begin());
}

void SystemModel::from_reduced(std::span<const double> z, std::span<double> x) const {
    std::copy(z.begin(), z.end(), x.begin());
}

void SystemModel::reduced_field(std::span<const double> z, std::span<const double> friction,
                                std::span<double> dz) const {
    field(z, friction, dz);
}

void SystemModel::reduced_rhs(std::span<const double> z, std::span<const SurfaceMode> modes,
                              std::span<double> dz) const {
    std::vector<double> x(dim());
    from_reduced(z, x);
    std::array<double, kMaxSurfaces> friction{};
    for (std::size_t i = 0; i < surfaces_.size(); ++i) {
        friction[i] = friction_torque(i, x, modes[i]);
    }
    reduced_field(z, std::span<const double>(friction.data(), surfaces_.size()), dz);
    for (std::size_t i = 0; i < surfaces_.size(); ++i) {
        if (modes[i] == SurfaceMode::stick) {
            dz[surfaces_[i].reduced_coordinate] = 0.0;
        }
    }
}

}  // namespace nsdyn
