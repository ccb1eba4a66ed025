#pragma once

#include "nsdyn/equilibrium.hpp"
#include "nsdyn/metrics.hpp"

#include <cstdint>

namespace nsdyn {

struct ClassifyConfig {
    double radius = 0.1;         ///< ball radius in tail-amplitude-normalized coordinates
    std::size_t n_probes = 50;   ///< per probed equilibrium
    std::uint64_t seed = 42;
    std::size_t workers = 1;     ///< 0 picks the hardware concurrency

    friend bool operator==(const ClassifyConfig&, const ClassifyConfig&) = default;
};

/// Hidden/self-excited test. Probes start in balls around the unstable
/// equilibria (around every equilibrium when none is unstable), drawn in
/// reduced coordinates with each axis scaled by the attractor's tail
/// amplitude (1 where that is zero). Near an unstable equilibrium half of the
/// radius goes along a random unstable eigendirection. The attractor is
/// self-excited when some probe matches it, hidden otherwise; with no
/// equilibria it is hidden and no probe is launched. Equilibria are
/// not_applicable. Probe i draws from its own generator seeded by (seed, i),
/// so the outcome does not depend on the worker count.
[[nodiscard]] AttractorReport classify_attractor(const SystemModel& model, AttractorReport report,
                                                 const std::vector<Equilibrium>& equilibria,
                                                 const IntegrationConfig& integration,
                                                 const MetricsConfig& metrics = {},
                                                 const ClassifyConfig& cfg = {});

}  // namespace nsdyn
