#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nsdyn {

/// Closed torque interval [lo, hi] in N·m. Degenerate (lo == hi) while a body
/// slides, a genuine interval while it sticks.
struct TorqueInterval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] static constexpr TorqueInterval point(double v) noexcept { return {v, v}; }
    [[nodiscard]] constexpr bool degenerate() const noexcept { return lo == hi; }
    [[nodiscard]] constexpr bool contains(double v) const noexcept { return lo <= v && v <= hi; }
    [[nodiscard]] constexpr bool strictly_contains(double v) const noexcept { return lo < v && v < hi; }
    [[nodiscard]] constexpr double width() const noexcept { return hi - lo; }
};

/// A point in phase space. Coordinate meaning is fixed by the owning model's
/// labels.
struct State {
    double t = 0.0;
    std::vector<double> x;

    [[nodiscard]] std::size_t size() const noexcept { return x.size(); }
    [[nodiscard]] std::span<const double> coords() const noexcept { return x; }

    friend bool operator==(const State&, const State&) = default;
};

[[nodiscard]] bool all_finite(std::span<const double> v) noexcept;

}  // namespace nsdyn
