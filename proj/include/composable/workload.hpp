#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace composable {

/// One application's demand: compute per resource kind plus the two
/// inter-resource flows (integer Gb/s).
struct Application {
    int id = 0;
    double cpu_ghz = 0.0;
    double mem_gb = 0.0;
    double sto_gb = 0.0;
    int cm_gbps = 0;
    int cd_gbps = 0;

    int total_flow_gbps() const noexcept { return cm_gbps + cd_gbps; }
    friend bool operator==(const Application&, const Application&) = default;
};

namespace demand {
inline constexpr std::array<double, 3> cpu_ghz{0.9, 1.8, 2.7};
inline constexpr std::array<double, 5> mem_gb{3.6, 7.2, 10.8, 26.0, 32.0};
inline constexpr std::array<double, 3> sto_gb{80.0, 160.0, 240.0};
inline constexpr int cm_min = 300, cm_max = 800;
inline constexpr int cd_min = 5, cd_max = 128;
} // namespace demand

/// xoshiro256** seeded through splitmix64. Fixed so that workloads are
/// reproducible across implementations; see README for test vectors.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) noexcept;

    std::uint64_t next() noexcept;

    /// Uniform integer in [0, bound) by rejection of the low `2^64 mod bound`
    /// values, then `x % bound`.
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
};

/// Draw order per application: cpu index, mem index, sto index, cm, cd.
std::vector<Application> generate_apps(std::uint64_t seed, int n);

nlohmann::json apps_to_json(const std::vector<Application>& apps);
/// Rejects values outside the demand sets/ranges, naming the field.
std::vector<Application> apps_from_json(const nlohmann::json& doc);

std::string serialize_apps(const std::vector<Application>& apps);
std::vector<Application> parse_apps(const std::string& text);

std::vector<Application> roundtrip(const std::vector<Application>& apps);

std::vector<Application> load_workload_file(const std::string& path);
void save_workload_file(const std::string& path, const std::vector<Application>& apps);

} // namespace composable
