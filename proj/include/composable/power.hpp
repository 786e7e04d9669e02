#pragma once

#include <span>

#include "composable/placement.hpp"
#include "composable/rwa.hpp"
#include "composable/topology.hpp"
#include "composable/workload.hpp"

namespace composable {

/// Weights of the four objective terms: network power, compute power,
/// rejected applications, active wavelengths.
struct ObjectiveWeights {
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double alpha3 = 1e5;
    double alpha4 = 1.0;
};

struct ObjectiveBreakdown {
    double tnpc_w = 0.0;
    double tcpc_w = 0.0;
    int tra = 0;
    int taw = 0;
    double objective = 0.0;
    double nch_w = 0.0;
    double tor_w = 0.0;
    double onboard_w = 0.0;
};

/// Idle share plus a load-proportional share over the dynamic range; zero
/// when the component hosts nothing. Throws CapacityViolation when
/// `load` exceeds capacity.
double component_power(const ResourceComponent& comp, double load, bool hosted);
inline double component_power(const ResourceComponent& comp, double load) {
    return component_power(comp, load, load > 0.0);
}

enum class NetworkElement { nch, tor, onboard };

double element_traffic_power(NetworkElement element, double traffic_bps, const RackTopology& rack);

/// Per-component hosted demand in kind units, indexed [node][kind].
std::vector<std::array<double, 3>> component_loads(const RackTopology& rack,
                                                   std::span<const Application> apps,
                                                   std::span<const Placement> decisions);

ObjectiveBreakdown aggregate_power(const RackTopology& rack, std::span<const Application> apps,
                                   std::span<const Placement> decisions,
                                   const LogicalNetwork& network, const ObjectiveWeights& weights);

double weighted_objective(const ObjectiveBreakdown& b, const ObjectiveWeights& w) noexcept;

} // namespace composable
