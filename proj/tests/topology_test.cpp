#include <doctest.h>

#include <algorithm>
#include <set>

#include "composable/errors.hpp"
#include "composable/topology.hpp"

using namespace composable;

TEST_CASE("default rack parameters") {
    const RackTopology rack = build_default_rack(9, 2, 50);
    REQUIRE(rack.num_nodes() == 9);
    CHECK(rack.tor_id() == 9);

    int components = 0;
    for (const Node& node : rack.nodes) {
        CHECK(node.interface_count == 2);
        const auto& cpu = node.component(ResourceKind::cpu);
        const auto& mem = node.component(ResourceKind::mem);
        const auto& sto = node.component(ResourceKind::sto);
        CHECK(cpu.capacity == 3.6);
        CHECK(cpu.peak_power_w == 130.0);
        CHECK(mem.capacity == 32.0);
        CHECK(mem.peak_power_w == 11.85);
        CHECK(sto.capacity == 320.0);
        CHECK(sto.peak_power_w == 6.19);
        for (const auto& c : node.components) {
            CHECK(c.dynamic_range == 0.30);
            CHECK(c.node_id == node.id);
            ++components;
        }
    }
    CHECK(components == 27);
    CHECK(rack.tor_idle_w == 312.0);
    CHECK(rack.tor_epb_j_per_bit == doctest::Approx(0.028e-12).epsilon(1e-12));
    CHECK(rack.onboard_epb_j_per_bit == doctest::Approx(0.1e-12).epsilon(1e-12));
    CHECK(rack.nch_epb_j_per_bit == doctest::Approx(1.4e-9).epsilon(1e-12));
    CHECK(rack.plan.partition_a == std::vector<int>{0});
    CHECK(rack.plan.partition_b == std::vector<int>{1});
}

TEST_CASE("single-node rack") {
    const RackTopology rack = build_default_rack(1, 2, 50);
    CHECK(rack.num_nodes() == 1);
    CHECK(rack.plan.partition_a == std::vector<int>{0});
    CHECK(rack.plan.partition_b == std::vector<int>{1});
    CHECK(validate(rack).empty());
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(build_default_rack(9, 3, 50), InvalidPlan);
    CHECK_THROWS_AS(build_default_rack(0, 2, 50), InvalidArgument);
    CHECK_THROWS_AS(build_default_rack(9, 0, 50), InvalidArgument);
    CHECK_THROWS_AS(build_default_rack(9, -2, 50), InvalidArgument);
    CHECK_THROWS_AS(build_default_rack(9, 2, 0), InvalidArgument);
    CHECK_THROWS_AS(build_default_rack(9, 2, -50), InvalidArgument);
}

TEST_CASE("partitions are disjoint and exhaustive") {
    for (int w = 2; w <= 20; w += 2) {
        const WavelengthPlan plan = make_plan(w, 100);
        CHECK(plan.partition_a.size() == static_cast<std::size_t>(w / 2));
        CHECK(plan.partition_b.size() == static_cast<std::size_t>(w / 2));
        std::set<int> all(plan.partition_a.begin(), plan.partition_a.end());
        for (int ch : plan.partition_b) CHECK(all.insert(ch).second);
        CHECK(all.size() == static_cast<std::size_t>(w));
        CHECK(*all.begin() == 0);
        CHECK(*all.rbegin() == w - 1);
    }
}

TEST_CASE("validate accepts every constructed rack") {
    for (int n : {1, 2, 3, 9, 16})
        for (int w : {2, 4, 6, 8, 10})
            for (double r : {10.0, 50.0, 100.0}) CHECK(validate(build_default_rack(n, w, r)).empty());
}

TEST_CASE("validate reports a channel in both partitions once") {
    RackTopology rack = build_default_rack(9, 2, 50);
    rack.plan.partition_b = {0};
    const auto v = validate(rack);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("channel 0") != std::string::npos);
}

TEST_CASE("validate reports a zero dynamic range once") {
    RackTopology rack = build_default_rack(9, 2, 50);
    rack.nodes[4].components[index_of(ResourceKind::cpu)].dynamic_range = 0.0;
    const auto v = validate(rack);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("node 4 cpu") != std::string::npos);
}

TEST_CASE("validate never mutates its input") {
    RackTopology rack = build_default_rack(3, 4, 50);
    rack.tor_idle_w = -1.0;
    const RackTopology before = rack;
    CHECK(validate(rack).size() == 1);
    CHECK(rack.tor_idle_w == before.tor_idle_w);
    CHECK(rack.plan.partition_a == before.plan.partition_a);
}

TEST_CASE("node capacity per wavelength count and rate") {
    // Tbps per node, rows 50 and 100 Gb/s, columns 2..10 wavelengths.
    const double at50[] = {0.1, 0.2, 0.3, 0.4, 0.5};
    const double at100[] = {0.2, 0.4, 0.6, 0.8, 1.0};
    for (int i = 0; i < 5; ++i) {
        const int w = 2 * (i + 1);
        CHECK(node_capacity_gbps(make_plan(w, 50)) / 1000.0 == at50[i]);
        CHECK(node_capacity_gbps(make_plan(w, 100)) / 1000.0 == at100[i]);
    }
    CHECK(node_capacity_gbps(make_plan(2, 50)) == 100.0);
    CHECK(node_capacity_gbps(make_plan(10, 100)) == 1000.0);
    CHECK(node_capacity_gbps(make_plan(8, 50)) == 400.0);
}

TEST_CASE("interchangeable classes follow component parameters") {
    RackTopology rack = build_default_rack(4, 2, 50);
    CHECK(interchangeable_classes(rack) == std::vector<int>{0, 0, 0, 0});
    rack.nodes[2].components[index_of(ResourceKind::mem)].capacity = 64.0;
    CHECK(interchangeable_classes(rack) == std::vector<int>{0, 0, 1, 0});
}

TEST_CASE("rack JSON defaults") {
    const RackTopology rack = rack_from_json(nlohmann::json::object());
    CHECK(rack.num_nodes() == 9);
    CHECK(rack.plan.num_channels == 2);
    CHECK(rack.plan.channel_rate_gbps == 50.0);
    CHECK(rack.nch_epb_j_per_bit == defaults::nch_epb);
    CHECK(validate(rack).empty());
}

TEST_CASE("rack JSON overrides") {
    const auto doc = nlohmann::json::parse(R"({
        "nodes": [{"cpu_ghz": 7.2}, {}, {"sto_gb": "640"}],
        "wavelengths": 6,
        "rate_gbps": 100,
        "power": {"nch_epb": "1.4e-12", "tor_idle_w": 0, "charge_tor_idle": false}
    })");
    const RackTopology rack = rack_from_json(doc);
    REQUIRE(rack.num_nodes() == 3);
    CHECK(rack.nodes[0].component(ResourceKind::cpu).capacity == 7.2);
    CHECK(rack.nodes[1].component(ResourceKind::cpu).capacity == 3.6);
    CHECK(rack.nodes[2].component(ResourceKind::sto).capacity == 640.0);
    CHECK(rack.plan.num_channels == 6);
    CHECK(rack.plan.channel_rate_gbps == 100.0);
    CHECK(rack.nch_epb_j_per_bit == 1.4e-12);
    CHECK(rack.tor_idle_w == 0.0);
    CHECK_FALSE(rack.charge_tor_idle);
    CHECK(interchangeable_classes(rack) == std::vector<int>{0, 1, 2});

    const RackTopology again = rack_from_json(rack_to_json(rack));
    CHECK(again.num_nodes() == 3);
    CHECK(again.nodes[2].component(ResourceKind::sto).capacity == 640.0);
    CHECK(again.nch_epb_j_per_bit == 1.4e-12);
    CHECK_FALSE(again.charge_tor_idle);
}

namespace {

std::string field_of(const char* text) {
    try {
        rack_from_json(nlohmann::json::parse(text));
    } catch (const ParseError& e) {
        return e.field();
    }
    return "<no error>";
}

} // namespace

TEST_CASE("rack JSON errors name the field") {
    CHECK(field_of(R"({"nodez": 3})") == "nodez");
    CHECK(field_of(R"({"wavelengths": 3})") == "wavelengths");
    CHECK(field_of(R"({"rate_gbps": -1})") == "rate_gbps");
    CHECK(field_of(R"({"nodes": 0})") == "nodes");
    CHECK(field_of(R"({"nodes": [{"cpu_ghz": 0}]})") == "nodes[0].cpu_ghz");
    CHECK(field_of(R"({"nodes": [{}, {"gpu": 1}]})") == "nodes[1].gpu");
    CHECK(field_of(R"({"power": {"nch_epb": "lots"}})") == "power.nch_epb");
    CHECK(field_of(R"({"power": {"dynamic_range": 1.5}})") == "power.dynamic_range");
    CHECK(field_of(R"({"power": {"fan_w": 3}})") == "power.fan_w");
}
