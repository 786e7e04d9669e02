#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace composable {

enum class ResourceKind : std::uint8_t { cpu = 0, mem = 1, sto = 2 };

inline constexpr std::array<ResourceKind, 3> kResourceKinds{
    ResourceKind::cpu, ResourceKind::mem, ResourceKind::sto};

constexpr std::size_t index_of(ResourceKind kind) noexcept {
    return static_cast<std::size_t>(kind);
}

std::string_view to_string(ResourceKind kind) noexcept;

/// Capacity is in GHz for CPU and GB for memory and storage.
struct ResourceComponent {
    int node_id = 0;
    ResourceKind kind = ResourceKind::cpu;
    double capacity = 0.0;
    double peak_power_w = 0.0;
    double dynamic_range = 0.0;

    double idle_power_w() const noexcept { return (1.0 - dynamic_range) * peak_power_w; }
};

struct Node {
    int id = 0;
    std::array<ResourceComponent, 3> components{};
    int interface_count = 2;

    const ResourceComponent& component(ResourceKind kind) const noexcept {
        return components[index_of(kind)];
    }
};

/// Rack-wide wavelength pool. Each channel has a single transmitter in the
/// whole rack; the two partitions record which interface transmits it.
struct WavelengthPlan {
    int num_channels = 0;
    double channel_rate_gbps = 0.0;
    std::vector<int> partition_a;
    std::vector<int> partition_b;
};

/// Energy-per-bit values are joules per bit.
struct RackTopology {
    std::vector<Node> nodes;
    WavelengthPlan plan;
    double tor_idle_w = 0.0;
    double tor_epb_j_per_bit = 0.0;
    double nch_epb_j_per_bit = 0.0;
    double onboard_epb_j_per_bit = 0.0;
    bool charge_tor_idle = true;

    int num_nodes() const noexcept { return static_cast<int>(nodes.size()); }
    /// The TOR switch is addressed as the node id after the last node.
    int tor_id() const noexcept { return num_nodes(); }
};

// Per-component defaults (capacity, peak power, dynamic range).
namespace defaults {
inline constexpr double cpu_ghz = 3.6;
inline constexpr double cpu_peak_w = 130.0;
inline constexpr double mem_gb = 32.0;
inline constexpr double mem_peak_w = 11.85;
inline constexpr double sto_gb = 320.0;
inline constexpr double sto_peak_w = 6.19;
inline constexpr double dynamic_range = 0.30;
inline constexpr double tor_idle_w = 312.0;
inline constexpr double tor_epb = 0.028e-12;
inline constexpr double onboard_epb = 0.1e-12;
// 14 W offload NIC at 10 Gb/s.
inline constexpr double nch_epb = 1.4e-9;
} // namespace defaults

/// Even channel ids go to interface A, odd ids to interface B.
WavelengthPlan make_plan(int num_channels, double rate_gbps);

RackTopology build_default_rack(int num_nodes, int num_channels, double rate_gbps);

/// Copy of `rack` with its wavelength plan replaced.
RackTopology with_plan(const RackTopology& rack, int num_channels, double rate_gbps);

/// Every violated invariant, one human-readable line each.
std::vector<std::string> validate(const RackTopology& rack);

/// Peak per-node transmit capacity: a node may be granted the whole pool.
double node_capacity_gbps(const WavelengthPlan& plan) noexcept;

/// Nodes with identical component parameters are interchangeable; returns a
/// class id per node (ids are dense, ordered by first appearance).
std::vector<int> interchangeable_classes(const RackTopology& rack);

/// Rack configuration file. Keys: `nodes` (count or array of
/// `{cpu_ghz, mem_gb, sto_gb}`), `wavelengths`, `rate_gbps`, `power`.
/// Missing keys take the default values above; W=2 and R=50 when absent.
RackTopology rack_from_json(const nlohmann::json& doc);
RackTopology load_rack_file(const std::string& path);
nlohmann::json rack_to_json(const RackTopology& rack);

} // namespace composable
