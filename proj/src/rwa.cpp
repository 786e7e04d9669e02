#include "composable/rwa.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <utility>

#include "composable/errors.hpp"

namespace composable {

FlowAggregate aggregate_flows(const RackTopology& rack, std::span<const Application> apps,
                              std::span<const Placement> decisions) {
    if (apps.size() != decisions.size())
        throw InvalidArgument("one decision per application is required");

    FlowAggregate out;
    out.intra_node_bps.assign(rack.nodes.size(), 0.0);
    for (std::size_t i = 0; i < apps.size(); ++i) {
        const Placement& p = decisions[i];
        if (p.is_rejected()) continue;
        const Application& app = apps[i];
        const NodeTriple& t = p.nodes();
        auto route = [&](int other, int gbps, FlowKind kind) {
            if (other == t.cpu)
                out.intra_node_bps[static_cast<std::size_t>(t.cpu)] += gbps * 1e9;
            else
                out.inter_node.push_back({t.cpu, other, gbps, app.id, kind});
        };
        route(t.mem, app.cm_gbps, FlowKind::cpu_mem);
        route(t.sto, app.cd_gbps, FlowKind::cpu_sto);
    }
    return out;
}

int channels_required(double gbps, double rate_gbps) {
    if (!(rate_gbps > 0.0)) throw InvalidArgument("channel rate must be positive");
    if (!(gbps > 0.0)) return 0;
    const double q = gbps / rate_gbps;
    const double nearest = std::nearbyint(q);
    if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, q)) return static_cast<int>(nearest);
    return static_cast<int>(std::ceil(q));
}

ChannelResult assign_routes(std::span<const RoutedFlow> routes, const WavelengthPlan& plan,
                            int num_nodes, std::span<const double> intra_node_bps) {
    const int tor = num_nodes;
    std::map<std::pair<int, int>, double> hop_gbps;
    for (const RoutedFlow& r : routes) {
        if (r.path.size() < 2) throw InvalidArgument("route needs at least two hops");
        if (!(r.gbps > 0.0)) throw InvalidArgument("routed flow must carry positive traffic");
        for (std::size_t h = 0; h < r.path.size(); ++h) {
            const int v = r.path[h];
            if (v < 0 || v > tor) throw InvalidArgument("route visits unknown node " + std::to_string(v));
            if (h > 0) {
                if (r.path[h - 1] == v) throw InvalidArgument("route repeats node " + std::to_string(v));
                hop_gbps[{r.path[h - 1], v}] += r.gbps;
            }
        }
    }

    const double rate = plan.channel_rate_gbps;
    int needed = 0;
    for (const auto& [hop, gbps] : hop_gbps) needed += channels_required(gbps, rate);
    if (needed > plan.num_channels) return ChannelDeficit{needed, plan.num_channels};

    LogicalNetwork net;
    net.nch_traffic_bps.assign(static_cast<std::size_t>(num_nodes), 0.0);
    net.onboard_traffic_bps.assign(static_cast<std::size_t>(num_nodes), 0.0);
    net.assignments.reserve(static_cast<std::size_t>(needed));

    int next_channel = 0;
    for (const auto& [hop, gbps] : hop_gbps) {
        const int k = channels_required(gbps, rate);
        double remaining = gbps;
        for (int j = 0; j < k; ++j) {
            const double carried = (j + 1 == k) ? remaining : rate;
            remaining -= carried;
            net.assignments.push_back({next_channel++, hop.first, hop.second, carried});
        }
    }

    for (const RoutedFlow& r : routes) {
        const double bps = r.gbps * 1e9;
        for (int v : r.path) {
            if (v == tor)
                net.tor_traffic_bps += bps;
            else
                net.nch_traffic_bps[static_cast<std::size_t>(v)] += bps;
        }
        for (int end : {r.path.front(), r.path.back()})
            if (end != tor) net.onboard_traffic_bps[static_cast<std::size_t>(end)] += bps;
    }
    for (std::size_t n = 0; n < intra_node_bps.size() && n < net.onboard_traffic_bps.size(); ++n)
        net.onboard_traffic_bps[n] += intra_node_bps[n];
    return net;
}

ChannelResult assign_channels(std::span<const FlowDemand> flows, const WavelengthPlan& plan,
                              int num_nodes, std::span<const double> intra_node_bps) {
    std::vector<RoutedFlow> routes;
    routes.reserve(flows.size());
    for (const FlowDemand& f : flows) {
        if (f.src_node == f.dst_node)
            throw InvalidArgument("flow demand between a node and itself (app " +
                                  std::to_string(f.app_id) + ")");
        if (f.gbps <= 0) throw InvalidArgument("flow demand must be positive");
        routes.push_back({{f.src_node, f.dst_node}, static_cast<double>(f.gbps)});
    }
    return assign_routes(routes, plan, num_nodes, intra_node_bps);
}

namespace {

using Graph = std::vector<std::vector<double>>;

double max_flow(Graph cap, int s, int t) {
    const auto n = cap.size();
    double total = 0.0;
    for (;;) {
        std::vector<int> parent(n, -1);
        parent[static_cast<std::size_t>(s)] = s;
        std::deque<int> queue{s};
        while (!queue.empty() && parent[static_cast<std::size_t>(t)] < 0) {
            const int u = queue.front();
            queue.pop_front();
            for (std::size_t v = 0; v < n; ++v)
                if (parent[v] < 0 && cap[static_cast<std::size_t>(u)][v] > 1e-12) {
                    parent[v] = u;
                    queue.push_back(static_cast<int>(v));
                }
        }
        if (parent[static_cast<std::size_t>(t)] < 0) return total;
        double push = std::numeric_limits<double>::infinity();
        for (int v = t; v != s; v = parent[static_cast<std::size_t>(v)])
            push = std::min(push, cap[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])]
                                     [static_cast<std::size_t>(v)]);
        for (int v = t; v != s; v = parent[static_cast<std::size_t>(v)]) {
            const auto u = static_cast<std::size_t>(parent[static_cast<std::size_t>(v)]);
            cap[u][static_cast<std::size_t>(v)] -= push;
            cap[static_cast<std::size_t>(v)][u] += push;
        }
        total += push;
    }
}

std::string fmt_gbps(double x) {
    std::string s = std::to_string(x);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

} // namespace

std::vector<std::string> validate_logical_network(const LogicalNetwork& network,
                                                  const WavelengthPlan& plan,
                                                  std::span<const FlowDemand> flows,
                                                  int num_nodes) {
    constexpr double kTol = 1e-9;
    std::vector<std::string> out;
    const int tor = num_nodes;
    const auto vertices = static_cast<std::size_t>(num_nodes + 1);
    Graph carried(vertices, std::vector<double>(vertices, 0.0));

    std::map<int, int> uses;
    for (const ChannelAssignment& a : network.assignments) {
        const std::string name = "channel " + std::to_string(a.channel_id);
        ++uses[a.channel_id];
        if (a.channel_id < 0 || a.channel_id >= plan.num_channels)
            out.push_back(name + ": not in the wavelength plan");
        const bool ends_ok = a.src >= 0 && a.src <= tor && a.dst >= 0 && a.dst <= tor;
        if (!ends_ok) {
            out.push_back(name + ": endpoint outside the rack");
            continue;
        }
        if (a.src == a.dst) out.push_back(name + ": source equals destination");
        if (!(a.carried_gbps > 0.0)) out.push_back(name + ": carries no traffic");
        if (a.carried_gbps > plan.channel_rate_gbps * (1.0 + kTol) + kTol)
            out.push_back(name + ": carries " + fmt_gbps(a.carried_gbps) + " Gb/s above the " +
                          fmt_gbps(plan.channel_rate_gbps) + " Gb/s channel rate");
        carried[static_cast<std::size_t>(a.src)][static_cast<std::size_t>(a.dst)] += a.carried_gbps;
    }
    for (auto [ch, count] : uses)
        if (count > 1)
            out.push_back("channel " + std::to_string(ch) + ": bound to " + std::to_string(count) +
                          " transmitters");

    std::map<std::pair<int, int>, double> demand;
    std::set<int> endpoints;
    for (const FlowDemand& f : flows) {
        if (f.src_node < 0 || f.src_node >= num_nodes || f.dst_node < 0 || f.dst_node >= num_nodes) {
            out.push_back("flow of app " + std::to_string(f.app_id) + " has an endpoint outside the rack");
            continue;
        }
        demand[{f.src_node, f.dst_node}] += f.gbps;
        endpoints.insert(f.src_node);
        endpoints.insert(f.dst_node);
    }
    for (const auto& [pair, gbps] : demand) {
        const auto [s, d] = pair;
        const double direct = carried[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
        if (direct + kTol >= gbps) continue;
        const double reachable = max_flow(carried, s, d);
        if (reachable + kTol * std::max(1.0, gbps) < gbps)
            out.push_back("pair " + std::to_string(s) + "->" + std::to_string(d) + ": demand " +
                          fmt_gbps(gbps) + " Gb/s but only " + fmt_gbps(reachable) + " Gb/s carried");
    }

    for (int v = 0; v <= tor; ++v) {
        if (endpoints.contains(v)) continue;
        double in = 0.0, out_gbps = 0.0;
        for (std::size_t u = 0; u < vertices; ++u) {
            in += carried[u][static_cast<std::size_t>(v)];
            out_gbps += carried[static_cast<std::size_t>(v)][u];
        }
        if (std::abs(in - out_gbps) > kTol * std::max(1.0, in))
            out.push_back((v == tor ? std::string("TOR") : "node " + std::to_string(v)) +
                          ": relays " + fmt_gbps(in) + " Gb/s in but " + fmt_gbps(out_gbps) + " Gb/s out");
    }
    return out;
}

} // namespace composable
