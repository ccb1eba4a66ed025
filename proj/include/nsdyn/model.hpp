#pragma once

#include "nsdyn/params.hpp"
#include "nsdyn/types.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nsdyn {

/// Friction mode of one switching surface. While sliding, the direction is
/// fixed so the vector field stays smooth inside an integration step.
enum class SurfaceMode : std::uint8_t { slip_positive, slip_negative, stick };

[[nodiscard]] constexpr int side_of(SurfaceMode m) noexcept {
    return m == SurfaceMode::slip_positive ? 1 : (m == SurfaceMode::slip_negative ? -1 : 0);
}

[[nodiscard]] constexpr SurfaceMode slip_mode(int side) noexcept {
    return side >= 0 ? SurfaceMode::slip_positive : SurfaceMode::slip_negative;
}

/// Zero set of a disc's sliding velocity. The guard is
/// x[stuck_coordinate] - reference_velocity.
struct SwitchingSurface {
    std::string name;
    std::size_t stuck_coordinate = 0;
    double reference_velocity = 0.0;
    std::size_t reduced_coordinate = 0;  ///< same velocity in reduced coordinates
};

/// A velocity reported by steady-state metrics. `offset` converts the state
/// coordinate to the ground frame (the induction model integrates velocities
/// relative to the rotating field).
struct VelocityChannel {
    std::string label;
    std::size_t coordinate = 0;
    double offset = 0.0;
};

/// Continuum of rest states where every stuck body is held by friction. The
/// free reduced coordinate ranges over [lo, hi]; the rest of the state is
/// `representative`.
struct StuckFamily {
    std::vector<double> representative;  ///< reduced coordinates
    std::size_t free_coordinate = 0;
    double lo = 0.0;
    double hi = 0.0;
};

/// Piecewise-smooth dynamical system with set-valued friction on its
/// switching surfaces. Implementations are immutable and reentrant.
class SystemModel {
public:
    virtual ~SystemModel() = default;

    [[nodiscard]] virtual std::string_view name() const noexcept = 0;
    [[nodiscard]] std::size_t dim() const noexcept { return labels_.size(); }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
    [[nodiscard]] const std::vector<SwitchingSurface>& surfaces() const noexcept { return surfaces_; }
    [[nodiscard]] const std::vector<VelocityChannel>& velocity_channels() const noexcept { return channels_; }
    [[nodiscard]] const ParamTable& params() const noexcept { return params_; }

    /// Index into velocity_channels() of the driven rotor.
    [[nodiscard]] std::size_t rotor_channel() const noexcept { return rotor_channel_; }
    /// Coordinate whose peaks define the oscillation period and amplitude.
    [[nodiscard]] std::size_t oscillation_coordinate() const noexcept { return oscillation_coordinate_; }
    /// Rotor speed without structural load, when the model has one.
    [[nodiscard]] virtual std::optional<double> no_load_velocity() const { return std::nullopt; }

    [[nodiscard]] std::optional<std::size_t> coordinate_index(std::string_view label) const noexcept;

    [[nodiscard]] double guard(std::size_t surface, std::span<const double> x) const noexcept {
        const auto& s = surfaces_[surface];
        return x[s.stuck_coordinate] - s.reference_velocity;
    }

    /// Friction interval available to hold the body of `surface` at rest.
    [[nodiscard]] virtual TorqueInterval holding_interval(std::size_t surface,
                                                          std::span<const double> x) const = 0;
    /// Net non-friction torque on the body of `surface`.
    [[nodiscard]] virtual double balance_torque(std::size_t surface, std::span<const double> x) const = 0;
    /// Sliding friction on the body of `surface` with the direction fixed to `side`.
    [[nodiscard]] virtual double sliding_friction(std::size_t surface, std::span<const double> x,
                                                  int side) const = 0;

    /// Smooth vector field for concrete friction torques, one per surface.
    virtual void field(std::span<const double> x, std::span<const double> friction,
                       std::span<double> dxdt) const = 0;

    /// Friction torque in the given mode: the sliding branch, or the exact
    /// balance torque while stuck.
    [[nodiscard]] double friction_torque(std::size_t surface, std::span<const double> x, SurfaceMode mode) const;

    /// Vector field of the mode-selected branch. Stuck velocities have zero
    /// derivative.
    void rhs(std::span<const double> x, std::span<const SurfaceMode> modes, std::span<double> dxdt) const;

    /// Slip modes chosen from the sign of each guard (zero counts as positive).
    [[nodiscard]] std::vector<SurfaceMode> modes_from_signs(std::span<const double> x) const;

    // Reduced coordinates quotient out the symmetry directions (absolute
    // angles that never feed back, rotating current phasors) so that steady
    // rotation becomes a fixed point. Defaults are the identity.
    [[nodiscard]] virtual std::size_t reduced_dim() const { return dim(); }
    [[nodiscard]] virtual std::vector<std::string> reduced_labels() const { return labels_; }
    virtual void to_reduced(std::span<const double> x, std::span<double> z) const;
    virtual void from_reduced(std::span<const double> z, std::span<double> x) const;
    virtual void reduced_field(std::span<const double> z, std::span<const double> friction,
                               std::span<double> dz) const;
    void reduced_rhs(std::span<const double> z, std::span<const SurfaceMode> modes, std::span<double> dz) const;

    /// Newton starting points, in reduced coordinates.
    [[nodiscard]] virtual std::vector<std::vector<double>> equilibrium_seeds() const = 0;
    /// Equilibria from the model's scalar reduced equation, in reduced coordinates.
    [[nodiscard]] virtual std::vector<std::vector<double>> scalar_equilibria() const { return {}; }
    [[nodiscard]] virtual std::vector<StuckFamily> stuck_equilibria() const { return {}; }

protected:
    SystemModel(std::vector<std::string> labels, std::vector<SwitchingSurface> surfaces,
                std::vector<VelocityChannel> channels, std::size_t rotor_channel,
                std::size_t oscillation_coordinate, ParamTable params);

private:
    std::vector<std::string> labels_;
    std::vector<SwitchingSurface> surfaces_;
    std::vector<VelocityChannel> channels_;
    std::size_t rotor_channel_ = 0;
    std::size_t oscillation_coordinate_ = 0;
    ParamTable params_;
};

using ModelPtr = std::shared_ptr<const SystemModel>;

/// Names accepted by build_model.
[[nodiscard]] std::span<const std::string> model_names() noexcept;

/// Parameter table with every default for `name`, provenance included.
[[nodiscard]] ParamTable default_params(std::string_view name);

/// Builds tora, drill_dc or drill_induction. Throws ConfigError for an unknown
/// name or parameters that violate a model invariant.
[[nodiscard]] ModelPtr build_model(std::string_view name, const ParamTable& params);
[[nodiscard]] ModelPtr build_model(std::string_view name);

}  // namespace nsdyn
