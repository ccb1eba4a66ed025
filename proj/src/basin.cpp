#include "nsdyn/basin.hpp"

#include "nsdyn/error.hpp"
#include "nsdyn/parallel.hpp"

#include <optional>

namespace nsdyn {

std::vector<double> BasinMap::initial_state(std::size_t ix, std::size_t iy) const {
    std::vector<double> x = grid.base;
    for (std::size_t c : grid.x.coordinates) {
        x[c] = grid.x.value(ix);
    }
    for (std::size_t c : grid.y.coordinates) {
        x[c] = grid.y.value(iy);
    }
    return x;
}

namespace {

void check_axis(const SystemModel& model, const GridAxis& axis, const char* name) {
    if (axis.n == 0) {
        throw ConfigError(std::string("basin grid: axis ") + name + " needs at least one point");
    }
    for (std::size_t c : axis.coordinates) {
        if (c >= model.dim()) {
            throw ConfigError(std::string("basin grid: axis ") + name + " names coordinate " + std::to_string(c) +
                              " but model '" + std::string(model.name()) + "' has " + std::to_string(model.dim()));
        }
    }
}

}  // namespace

BasinMap basin_scan(const SystemModel& model, const BasinGridSpec& grid, const IntegrationConfig& cfg,
                    const MetricsConfig& metrics, std::size_t workers) {
    validate(cfg);
    if (grid.base.size() != model.dim()) {
        throw ConfigError("basin grid: base state has " + std::to_string(grid.base.size()) +
                          " coordinates, model '" + std::string(model.name()) + "' needs " +
                          std::to_string(model.dim()));
    }
    check_axis(model, grid.x, "x");
    check_axis(model, grid.y, "y");

    BasinMap map;
    map.grid = grid;
    const std::size_t total = grid.x.n * grid.y.n;
    std::vector<std::optional<AttractorReport>> reports(total);
    parallel_for(total, workers == 0 ? default_workers() : workers, [&](std::size_t cell) {
        const State x0{0.0, map.initial_state(cell % grid.x.n, cell / grid.x.n)};
        try {
            reports[cell] = steady_state_metrics(model, integrate(model, x0, cfg), metrics);
        } catch (const Error&) {
            reports[cell].reset();
        }
    });

    map.cells.assign(total, kUnresolvedCell);
    for (std::size_t cell = 0; cell < total; ++cell) {
        const auto& r = reports[cell];
        if (!r || r->kind == AttractorKind::unresolved) {
            continue;
        }
        int label = kUnresolvedCell;
        for (std::size_t a = 0; a < map.attractors.size(); ++a) {
            if (matches(*r, map.attractors[a].report)) {
                label = static_cast<int>(a);
                break;
            }
        }
        if (label == kUnresolvedCell) {
            label = static_cast<int>(map.attractors.size());
            map.attractors.push_back({"A" + std::to_string(label) + ":" + std::string(to_string(r->kind)), *r});
        }
        map.cells[cell] = label;
    }
    return map;
}

}  // namespace nsdyn
