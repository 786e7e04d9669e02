#include "composable/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <span>

#include "composable/errors.hpp"

namespace composable {

using nlohmann::json;

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept {
    for (auto& word : s_) word = splitmix64(seed);
}

std::uint64_t Xoshiro256::next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

std::uint64_t Xoshiro256::below(std::uint64_t bound) noexcept {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t x = next();
        if (x >= threshold) return x % bound;
    }
}

std::vector<Application> generate_apps(std::uint64_t seed, int n) {
    if (n < 0) throw InvalidArgument("application count must be non-negative");
    Xoshiro256 rng(seed);
    std::vector<Application> apps;
    apps.reserve(static_cast<std::size_t>(n));
    for (int id = 0; id < n; ++id) {
        Application app;
        app.id = id;
        app.cpu_ghz = demand::cpu_ghz[rng.below(demand::cpu_ghz.size())];
        app.mem_gb = demand::mem_gb[rng.below(demand::mem_gb.size())];
        app.sto_gb = demand::sto_gb[rng.below(demand::sto_gb.size())];
        app.cm_gbps = demand::cm_min + static_cast<int>(rng.below(demand::cm_max - demand::cm_min + 1));
        app.cd_gbps = demand::cd_min + static_cast<int>(rng.below(demand::cd_max - demand::cd_min + 1));
        apps.push_back(app);
    }
    return apps;
}

json apps_to_json(const std::vector<Application>& apps) {
    json out = json::array();
    for (const Application& a : apps)
        out.push_back({{"id", a.id},
                       {"cpu_ghz", a.cpu_ghz},
                       {"mem_gb", a.mem_gb},
                       {"sto_gb", a.sto_gb},
                       {"cm_gbps", a.cm_gbps},
                       {"cd_gbps", a.cd_gbps}});
    return out;
}

namespace {

double from_set(const json& obj, const char* key, std::span<const double> allowed,
                const std::string& base) {
    const std::string path = base + "." + key;
    if (!obj.contains(key)) throw ParseError(path, "missing");
    const json& v = obj.at(key);
    if (!v.is_number()) throw ParseError(path, "expected a number");
    const double x = v.get<double>();
    for (double candidate : allowed)
        if (std::abs(x - candidate) <= 1e-9 * candidate) return candidate;
    throw ParseError(path, "value " + v.dump() + " is not an allowed demand");
}

int in_range(const json& obj, const char* key, int lo, int hi, const std::string& base) {
    const std::string path = base + "." + key;
    if (!obj.contains(key)) throw ParseError(path, "missing");
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ParseError(path, "expected an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi)
        throw ParseError(path, "value " + std::to_string(x) + " outside [" + std::to_string(lo) +
                                   ", " + std::to_string(hi) + "]");
    return static_cast<int>(x);
}

} // namespace

std::vector<Application> apps_from_json(const json& doc) {
    if (!doc.is_array()) throw ParseError("", "workload must be a JSON array");
    std::vector<Application> apps;
    apps.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& entry = doc[i];
        const std::string base = "[" + std::to_string(i) + "]";
        if (!entry.is_object()) throw ParseError(base, "expected an object");
        for (const auto& [key, _] : entry.items())
            if (key != "id" && key != "cpu_ghz" && key != "mem_gb" && key != "sto_gb" &&
                key != "cm_gbps" && key != "cd_gbps")
                throw ParseError(base + "." + key, "unknown application key");
        Application app;
        app.id = in_range(entry, "id", 0, static_cast<int>(doc.size()) - 1, base);
        if (app.id != static_cast<int>(i))
            throw ParseError(base + ".id", "ids must be 0..n-1 in file order");
        app.cpu_ghz = from_set(entry, "cpu_ghz", demand::cpu_ghz, base);
        app.mem_gb = from_set(entry, "mem_gb", demand::mem_gb, base);
        app.sto_gb = from_set(entry, "sto_gb", demand::sto_gb, base);
        app.cm_gbps = in_range(entry, "cm_gbps", demand::cm_min, demand::cm_max, base);
        app.cd_gbps = in_range(entry, "cd_gbps", demand::cd_min, demand::cd_max, base);
        apps.push_back(app);
    }
    return apps;
}

std::string serialize_apps(const std::vector<Application>& apps) {
    return apps_to_json(apps).dump(2) + "\n";
}

std::vector<Application> parse_apps(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("", std::string("workload is not valid JSON: ") + e.what());
    }
    return apps_from_json(doc);
}

std::vector<Application> roundtrip(const std::vector<Application>& apps) {
    return parse_apps(serialize_apps(apps));
}

std::vector<Application> load_workload_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("", "cannot open workload file " + path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_apps(text);
}

void save_workload_file(const std::string& path, const std::vector<Application>& apps) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path);
    out << serialize_apps(apps);
}

} // namespace composable
