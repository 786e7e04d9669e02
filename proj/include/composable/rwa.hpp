#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "composable/placement.hpp"
#include "composable/topology.hpp"
#include "composable/workload.hpp"

namespace composable {

enum class FlowKind { cpu_mem, cpu_sto };

/// Inter-node flow, oriented from the CPU-side node.
struct FlowDemand {
    int src_node = 0;
    int dst_node = 0;
    int gbps = 0;
    int app_id = 0;
    FlowKind kind = FlowKind::cpu_mem;

    friend bool operator==(const FlowDemand&, const FlowDemand&) = default;
};

struct ChannelAssignment {
    int channel_id = 0;
    int src = 0; ///< node id, or rack.tor_id() for the TOR
    int dst = 0;
    double carried_gbps = 0.0;

    friend bool operator==(const ChannelAssignment&, const ChannelAssignment&) = default;
};

/// Wavelength bindings plus per-element traffic tallies (bits per second).
struct LogicalNetwork {
    std::vector<ChannelAssignment> assignments;
    std::vector<double> nch_traffic_bps;     ///< indexed by node id
    double tor_traffic_bps = 0.0;
    std::vector<double> onboard_traffic_bps; ///< indexed by node id

    int active_wavelengths() const noexcept { return static_cast<int>(assignments.size()); }
};

struct FlowAggregate {
    std::vector<FlowDemand> inter_node;
    std::vector<double> intra_node_bps; ///< indexed by node id
};

/// Colocated pairs stay on the node's on-board fabric; every split pair
/// becomes one FlowDemand. Rejected applications contribute nothing.
FlowAggregate aggregate_flows(const RackTopology& rack, std::span<const Application> apps,
                              std::span<const Placement> decisions);

/// ceil(gbps / rate), tolerant of floating-point noise near integers.
int channels_required(double gbps, double rate_gbps);

/// A flow with an explicit hop sequence (first = source, last = destination).
/// Intermediate hops may be nodes or the TOR.
struct RoutedFlow {
    std::vector<int> path;
    double gbps = 0.0;
};

struct ChannelDeficit {
    int needed = 0;
    int available = 0;

    int deficit() const noexcept { return needed - available; }
};

using ChannelResult = std::variant<LogicalNetwork, ChannelDeficit>;

/// Direct single-hop assignment: pair demands are summed, pairs processed in
/// (src, dst) order, and each pair takes the lowest free channel ids.
/// `intra_node_bps`, when given, is added to the on-board tallies.
ChannelResult assign_channels(std::span<const FlowDemand> flows, const WavelengthPlan& plan,
                              int num_nodes, std::span<const double> intra_node_bps = {});

/// Same channel policy over arbitrary hop sequences. Each hop (u, v) is a
/// separate transmitter pair; every NCH on the path is charged per bit and the
/// TOR is charged for each traversal.
ChannelResult assign_routes(std::span<const RoutedFlow> routes, const WavelengthPlan& plan,
                            int num_nodes, std::span<const double> intra_node_bps = {});

/// Checks channel range and uniqueness, per-channel capacity, per-pair
/// coverage (direct or via relays) and flow conservation at pure relays.
std::vector<std::string> validate_logical_network(const LogicalNetwork& network,
                                                  const WavelengthPlan& plan,
                                                  std::span<const FlowDemand> flows,
                                                  int num_nodes);

} // namespace composable
