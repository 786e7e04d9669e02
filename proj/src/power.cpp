#include "composable/power.hpp"

#include <numeric>

#include "composable/errors.hpp"
#include "units.hpp"

namespace composable {

double component_power(const ResourceComponent& comp, double load, bool hosted) {
    if (load < 0.0) throw InvalidArgument("component load must be non-negative");
    if (load > comp.capacity * (1.0 + 1e-12))
        throw CapacityViolation("node " + std::to_string(comp.node_id) + " " +
                                std::string(to_string(comp.kind)) + " load " + std::to_string(load) +
                                " exceeds capacity " + std::to_string(comp.capacity));
    if (!hosted && load == 0.0) return 0.0;
    return comp.idle_power_w() + comp.dynamic_range * comp.peak_power_w * (load / comp.capacity);
}

double element_traffic_power(NetworkElement element, double traffic_bps, const RackTopology& rack) {
    if (traffic_bps < 0.0) throw InvalidArgument("traffic must be non-negative");
    switch (element) {
    case NetworkElement::nch: return rack.nch_epb_j_per_bit * traffic_bps;
    case NetworkElement::onboard: return rack.onboard_epb_j_per_bit * traffic_bps;
    case NetworkElement::tor:
        return (rack.charge_tor_idle ? rack.tor_idle_w : 0.0) + rack.tor_epb_j_per_bit * traffic_bps;
    }
    return 0.0;
}

std::vector<std::array<double, 3>> component_loads(const RackTopology& rack,
                                                   std::span<const Application> apps,
                                                   std::span<const Placement> decisions) {
    if (apps.size() != decisions.size())
        throw InvalidArgument("one decision per application is required");
    const int n = rack.num_nodes();
    std::vector<std::array<std::int64_t, 3>> milli(static_cast<std::size_t>(n), {0, 0, 0});
    for (std::size_t i = 0; i < apps.size(); ++i) {
        const Placement& p = decisions[i];
        if (p.is_rejected()) continue;
        const NodeTriple& t = p.nodes();
        for (int node : {t.cpu, t.mem, t.sto})
            if (node < 0 || node >= n)
                throw InvalidArgument("app " + std::to_string(apps[i].id) + " placed on unknown node " +
                                      std::to_string(node));
        milli[static_cast<std::size_t>(t.cpu)][index_of(ResourceKind::cpu)] += detail::to_milli(apps[i].cpu_ghz);
        milli[static_cast<std::size_t>(t.mem)][index_of(ResourceKind::mem)] += detail::to_milli(apps[i].mem_gb);
        milli[static_cast<std::size_t>(t.sto)][index_of(ResourceKind::sto)] += detail::to_milli(apps[i].sto_gb);
    }
    std::vector<std::array<double, 3>> out(milli.size());
    for (std::size_t node = 0; node < milli.size(); ++node)
        for (std::size_t k = 0; k < 3; ++k) {
            const auto& comp = rack.nodes[node].components[k];
            if (milli[node][k] > detail::to_milli(comp.capacity))
                throw CapacityViolation("node " + std::to_string(node) + " " +
                                        std::string(to_string(comp.kind)) + " demand " +
                                        std::to_string(milli[node][k] / 1000.0) + " exceeds capacity " +
                                        std::to_string(comp.capacity));
            // Clamp so that a load equal to capacity after milli rounding never
            // trips component_power's own check.
            out[node][k] = std::min(static_cast<double>(milli[node][k]) / 1000.0, comp.capacity);
        }
    return out;
}

double weighted_objective(const ObjectiveBreakdown& b, const ObjectiveWeights& w) noexcept {
    return w.alpha1 * b.tnpc_w + w.alpha2 * b.tcpc_w + w.alpha3 * b.tra + w.alpha4 * b.taw;
}

ObjectiveBreakdown aggregate_power(const RackTopology& rack, std::span<const Application> apps,
                                   std::span<const Placement> decisions,
                                   const LogicalNetwork& network, const ObjectiveWeights& weights) {
    ObjectiveBreakdown b;
    const auto loads = component_loads(rack, apps, decisions);
    for (std::size_t node = 0; node < loads.size(); ++node)
        for (std::size_t k = 0; k < 3; ++k)
            b.tcpc_w += component_power(rack.nodes[node].components[k], loads[node][k]);

    const double nch_bps = std::accumulate(network.nch_traffic_bps.begin(), network.nch_traffic_bps.end(), 0.0);
    const double onboard_bps =
        std::accumulate(network.onboard_traffic_bps.begin(), network.onboard_traffic_bps.end(), 0.0);
    b.nch_w = element_traffic_power(NetworkElement::nch, nch_bps, rack);
    b.tor_w = element_traffic_power(NetworkElement::tor, network.tor_traffic_bps, rack);
    b.onboard_w = element_traffic_power(NetworkElement::onboard, onboard_bps, rack);
    b.tnpc_w = b.nch_w + b.tor_w + b.onboard_w;

    b.tra = static_cast<int>(std::count_if(decisions.begin(), decisions.end(),
                                           [](const Placement& p) { return p.is_rejected(); }));
    b.taw = network.active_wavelengths();
    b.objective = weighted_objective(b, weights);
    return b;
}

} // namespace composable
