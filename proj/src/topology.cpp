#include "composable/topology.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "composable/errors.hpp"

namespace composable {

using nlohmann::json;

std::string_view to_string(ResourceKind kind) noexcept {
    switch (kind) {
    case ResourceKind::cpu: return "cpu";
    case ResourceKind::mem: return "mem";
    case ResourceKind::sto: return "sto";
    }
    return "?";
}

WavelengthPlan make_plan(int num_channels, double rate_gbps) {
    if (num_channels <= 0)
        throw InvalidArgument("num_channels must be positive, got " + std::to_string(num_channels));
    if (num_channels % 2 != 0)
        throw InvalidPlan("num_channels must be even to split across two interfaces, got " +
                          std::to_string(num_channels));
    if (!(rate_gbps > 0.0) || !std::isfinite(rate_gbps))
        throw InvalidArgument("rate_gbps must be positive");

    WavelengthPlan plan;
    plan.num_channels = num_channels;
    plan.channel_rate_gbps = rate_gbps;
    for (int ch = 0; ch < num_channels; ++ch)
        (ch % 2 == 0 ? plan.partition_a : plan.partition_b).push_back(ch);
    return plan;
}

namespace {

Node make_node(int id, double cpu_ghz, double mem_gb, double sto_gb, double cpu_peak,
               double mem_peak, double sto_peak, double dynamic_range) {
    Node node;
    node.id = id;
    node.components[index_of(ResourceKind::cpu)] = {id, ResourceKind::cpu, cpu_ghz, cpu_peak, dynamic_range};
    node.components[index_of(ResourceKind::mem)] = {id, ResourceKind::mem, mem_gb, mem_peak, dynamic_range};
    node.components[index_of(ResourceKind::sto)] = {id, ResourceKind::sto, sto_gb, sto_peak, dynamic_range};
    return node;
}

} // namespace

RackTopology build_default_rack(int num_nodes, int num_channels, double rate_gbps) {
    if (num_nodes < 1)
        throw InvalidArgument("num_nodes must be at least 1, got " + std::to_string(num_nodes));

    RackTopology rack;
    rack.plan = make_plan(num_channels, rate_gbps);
    rack.nodes.reserve(static_cast<std::size_t>(num_nodes));
    for (int id = 0; id < num_nodes; ++id)
        rack.nodes.push_back(make_node(id, defaults::cpu_ghz, defaults::mem_gb, defaults::sto_gb,
                                       defaults::cpu_peak_w, defaults::mem_peak_w,
                                       defaults::sto_peak_w, defaults::dynamic_range));
    rack.tor_idle_w = defaults::tor_idle_w;
    rack.tor_epb_j_per_bit = defaults::tor_epb;
    rack.nch_epb_j_per_bit = defaults::nch_epb;
    rack.onboard_epb_j_per_bit = defaults::onboard_epb;
    return rack;
}

RackTopology with_plan(const RackTopology& rack, int num_channels, double rate_gbps) {
    RackTopology copy = rack;
    copy.plan = make_plan(num_channels, rate_gbps);
    return copy;
}

std::vector<std::string> validate(const RackTopology& rack) {
    std::vector<std::string> out;

    if (rack.nodes.empty())
        out.emplace_back("rack has no nodes");
    for (std::size_t i = 0; i < rack.nodes.size(); ++i) {
        const Node& node = rack.nodes[i];
        const std::string where = "node " + std::to_string(node.id);
        if (node.id != static_cast<int>(i))
            out.push_back(where + ": id out of sequence (expected " + std::to_string(i) + ")");
        if (node.interface_count != 2)
            out.push_back(where + ": interface_count must be 2, got " +
                          std::to_string(node.interface_count));
        for (ResourceKind kind : kResourceKinds) {
            const ResourceComponent& comp = node.component(kind);
            const std::string name = where + " " + std::string(to_string(kind));
            if (comp.kind != kind)
                out.push_back(name + ": component slot holds kind " + std::string(to_string(comp.kind)));
            if (comp.node_id != node.id)
                out.push_back(name + ": component node_id " + std::to_string(comp.node_id) +
                              " does not match node");
            if (!(comp.capacity > 0.0))
                out.push_back(name + ": capacity must be positive");
            if (!(comp.peak_power_w > 0.0))
                out.push_back(name + ": peak_power_w must be positive");
            if (!(comp.dynamic_range > 0.0 && comp.dynamic_range <= 1.0))
                out.push_back(name + ": dynamic_range must lie in (0, 1]");
        }
    }

    const WavelengthPlan& plan = rack.plan;
    if (plan.num_channels <= 0 || plan.num_channels % 2 != 0)
        out.push_back("plan: num_channels must be even and positive, got " +
                      std::to_string(plan.num_channels));
    if (!(plan.channel_rate_gbps > 0.0))
        out.emplace_back("plan: channel_rate_gbps must be positive");
    const auto half = static_cast<std::size_t>(std::max(plan.num_channels, 0) / 2);
    if (plan.partition_a.size() != half || plan.partition_b.size() != half)
        out.push_back("plan: each partition must hold num_channels/2 channels");

    std::map<int, int> seen;
    for (int ch : plan.partition_a) ++seen[ch];
    for (int ch : plan.partition_b) ++seen[ch];
    bool duplicated = false;
    for (auto [ch, count] : seen) {
        if (count > 1) {
            out.push_back("plan: channel " + std::to_string(ch) + " appears in both partitions");
            duplicated = true;
        }
        if (ch < 0 || ch >= plan.num_channels)
            out.push_back("plan: channel " + std::to_string(ch) + " outside 0.." +
                          std::to_string(plan.num_channels - 1));
    }
    // With both partitions at W/2 a duplicate always leaves some id uncovered;
    // that gap is reported through the duplicate alone.
    if (!duplicated)
        for (int ch = 0; ch < plan.num_channels; ++ch)
            if (!seen.contains(ch))
                out.push_back("plan: channel " + std::to_string(ch) + " missing from both partitions");

    auto check_energy = [&](double value, const char* name) {
        if (!(value >= 0.0) || !std::isfinite(value))
            out.push_back(std::string(name) + " must be non-negative");
    };
    check_energy(rack.tor_idle_w, "tor_idle_w");
    check_energy(rack.tor_epb_j_per_bit, "tor_epb");
    check_energy(rack.nch_epb_j_per_bit, "nch_epb");
    check_energy(rack.onboard_epb_j_per_bit, "onboard_epb");
    return out;
}

double node_capacity_gbps(const WavelengthPlan& plan) noexcept {
    return static_cast<double>(plan.num_channels) * plan.channel_rate_gbps;
}

std::vector<int> interchangeable_classes(const RackTopology& rack) {
    using Key = std::array<std::tuple<double, double, double>, 3>;
    std::map<Key, int> ids;
    std::vector<int> out;
    out.reserve(rack.nodes.size());
    for (const Node& node : rack.nodes) {
        Key key;
        for (ResourceKind kind : kResourceKinds) {
            const auto& c = node.component(kind);
            key[index_of(kind)] = {c.capacity, c.peak_power_w, c.dynamic_range};
        }
        auto [it, inserted] = ids.try_emplace(key, static_cast<int>(ids.size()));
        out.push_back(it->second);
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

double number_field(const json& obj, const std::string& key, const std::string& path) {
    const json& v = obj.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        // Energy-per-bit values may be written as decimal strings ("1.4e-9").
        const std::string s = v.get<std::string>();
        double out = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec == std::errc() && ptr == s.data() + s.size()) return out;
    }
    throw ParseError(path, "expected a number");
}

double positive(double v, const std::string& path) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParseError(path, "must be positive");
    return v;
}

double non_negative(double v, const std::string& path) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ParseError(path, "must be non-negative");
    return v;
}

int integer_field(const json& obj, const std::string& key, const std::string& path) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ParseError(path, "expected an integer");
    return v.get<int>();
}

const std::set<std::string> kPowerKeys{"cpu_peak_w", "mem_peak_w", "sto_peak_w",
                                       "dynamic_range", "tor_idle_w", "tor_epb",
                                       "nch_epb", "onboard_epb", "charge_tor_idle"};

} // namespace

RackTopology rack_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("", "rack configuration must be a JSON object");
    for (const auto& [key, _] : doc.items())
        if (key != "nodes" && key != "wavelengths" && key != "rate_gbps" && key != "power")
            throw ParseError(key, "unknown rack configuration key");

    double cpu_peak = defaults::cpu_peak_w, mem_peak = defaults::mem_peak_w,
           sto_peak = defaults::sto_peak_w, dyn = defaults::dynamic_range;
    RackTopology rack;
    rack.tor_idle_w = defaults::tor_idle_w;
    rack.tor_epb_j_per_bit = defaults::tor_epb;
    rack.nch_epb_j_per_bit = defaults::nch_epb;
    rack.onboard_epb_j_per_bit = defaults::onboard_epb;

    if (doc.contains("power")) {
        const json& p = doc.at("power");
        if (!p.is_object()) throw ParseError("power", "expected an object");
        for (const auto& [key, _] : p.items())
            if (!kPowerKeys.contains(key)) throw ParseError("power." + key, "unknown power key");
        auto get = [&](const char* key, double& target, bool must_be_positive) {
            if (!p.contains(key)) return;
            const std::string path = std::string("power.") + key;
            const double v = number_field(p, key, path);
            target = must_be_positive ? positive(v, path) : non_negative(v, path);
        };
        get("cpu_peak_w", cpu_peak, true);
        get("mem_peak_w", mem_peak, true);
        get("sto_peak_w", sto_peak, true);
        get("dynamic_range", dyn, true);
        if (dyn > 1.0) throw ParseError("power.dynamic_range", "must lie in (0, 1]");
        get("tor_idle_w", rack.tor_idle_w, false);
        get("tor_epb", rack.tor_epb_j_per_bit, false);
        get("nch_epb", rack.nch_epb_j_per_bit, false);
        get("onboard_epb", rack.onboard_epb_j_per_bit, false);
        if (p.contains("charge_tor_idle")) {
            if (!p.at("charge_tor_idle").is_boolean())
                throw ParseError("power.charge_tor_idle", "expected a boolean");
            rack.charge_tor_idle = p.at("charge_tor_idle").get<bool>();
        }
    }

    const json nodes = doc.contains("nodes") ? doc.at("nodes") : json(9);
    if (nodes.is_number_integer()) {
        const int n = nodes.get<int>();
        if (n < 1) throw ParseError("nodes", "must be at least 1");
        for (int id = 0; id < n; ++id)
            rack.nodes.push_back(make_node(id, defaults::cpu_ghz, defaults::mem_gb, defaults::sto_gb,
                                           cpu_peak, mem_peak, sto_peak, dyn));
    } else if (nodes.is_array()) {
        if (nodes.empty()) throw ParseError("nodes", "must list at least one node");
        int id = 0;
        for (const json& entry : nodes) {
            const std::string base = "nodes[" + std::to_string(id) + "]";
            if (!entry.is_object()) throw ParseError(base, "expected an object");
            for (const auto& [key, _] : entry.items())
                if (key != "cpu_ghz" && key != "mem_gb" && key != "sto_gb")
                    throw ParseError(base + "." + key, "unknown node key");
            auto cap = [&](const char* key, double fallback) {
                if (!entry.contains(key)) return fallback;
                const std::string path = base + "." + key;
                return positive(number_field(entry, key, path), path);
            };
            rack.nodes.push_back(make_node(id, cap("cpu_ghz", defaults::cpu_ghz),
                                           cap("mem_gb", defaults::mem_gb),
                                           cap("sto_gb", defaults::sto_gb), cpu_peak, mem_peak,
                                           sto_peak, dyn));
            ++id;
        }
    } else {
        throw ParseError("nodes", "expected an integer or an array");
    }

    const int w = doc.contains("wavelengths") ? integer_field(doc, "wavelengths", "wavelengths") : 2;
    const double r = doc.contains("rate_gbps") ? number_field(doc, "rate_gbps", "rate_gbps") : 50.0;
    if (w < 2 || w % 2 != 0) throw ParseError("wavelengths", "must be even and at least 2");
    positive(r, "rate_gbps");
    rack.plan = make_plan(w, r);
    return rack;
}

RackTopology load_rack_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("", "cannot open rack file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("", "rack file " + path + " is not valid JSON: " + e.what());
    }
    return rack_from_json(doc);
}

json rack_to_json(const RackTopology& rack) {
    json nodes = json::array();
    for (const Node& node : rack.nodes)
        nodes.push_back({{"cpu_ghz", node.component(ResourceKind::cpu).capacity},
                         {"mem_gb", node.component(ResourceKind::mem).capacity},
                         {"sto_gb", node.component(ResourceKind::sto).capacity}});
    const Node& first = rack.nodes.front();
    return {{"nodes", nodes},
            {"wavelengths", rack.plan.num_channels},
            {"rate_gbps", rack.plan.channel_rate_gbps},
            {"power",
             {{"cpu_peak_w", first.component(ResourceKind::cpu).peak_power_w},
              {"mem_peak_w", first.component(ResourceKind::mem).peak_power_w},
              {"sto_peak_w", first.component(ResourceKind::sto).peak_power_w},
              {"dynamic_range", first.component(ResourceKind::cpu).dynamic_range},
              {"tor_idle_w", rack.tor_idle_w},
              {"tor_epb", rack.tor_epb_j_per_bit},
              {"nch_epb", rack.nch_epb_j_per_bit},
              {"onboard_epb", rack.onboard_epb_j_per_bit},
              {"charge_tor_idle", rack.charge_tor_idle}}}};
}

} // namespace composable
