#pragma once

#include "nsdyn/metrics.hpp"

#include <string>
#include <vector>

namespace nsdyn {

/// One grid direction. Every listed coordinate takes the same value, so a
/// single axis can sweep, say, both disc speeds together.
struct GridAxis {
    std::vector<std::size_t> coordinates;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 1;

    /// Value at index i; a one-point axis sits at lo.
    [[nodiscard]] double value(std::size_t i) const noexcept {
        return n <= 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }

    friend bool operator==(const GridAxis&, const GridAxis&) = default;
};

struct BasinGridSpec {
    GridAxis x;
    GridAxis y;
    std::vector<double> base;  ///< values of the coordinates not on an axis

    friend bool operator==(const BasinGridSpec&, const BasinGridSpec&) = default;
};

struct BasinAttractor {
    std::string label;
    AttractorReport report;  ///< metrics of the first cell that reached it

    friend bool operator==(const BasinAttractor&, const BasinAttractor&) = default;
};

inline constexpr int kUnresolvedCell = -1;

struct BasinMap {
    BasinGridSpec grid;
    std::vector<BasinAttractor> attractors;
    /// Attractor index per cell, row-major (cell = iy * x.n + ix), or kUnresolvedCell.
    std::vector<int> cells;

    [[nodiscard]] int at(std::size_t ix, std::size_t iy) const { return cells.at(iy * grid.x.n + ix); }
    /// Initial state of a cell.
    [[nodiscard]] std::vector<double> initial_state(std::size_t ix, std::size_t iy) const;

    friend bool operator==(const BasinMap&, const BasinMap&) = default;
};

/// Integrates every cell independently on `workers` threads (0 picks the
/// hardware concurrency). Labels are then assigned in cell order by matching
/// against the attractors seen so far, so the map does not depend on the
/// worker count. Failed or unresolved cells get kUnresolvedCell.
[[nodiscard]] BasinMap basin_scan(const SystemModel& model, const BasinGridSpec& grid, const IntegrationConfig& cfg,
                                  const MetricsConfig& metrics = {}, std::size_t workers = 1);

}  // namespace nsdyn
