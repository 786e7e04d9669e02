#include "composable/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>

#include "composable/errors.hpp"

namespace composable {

using nlohmann::json;

std::string format_sig6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double round_sig6(double x) {
    return std::strtod(format_sig6(x).c_str(), nullptr);
}

json solution_to_json(const SolutionRecord& record) {
    const Solution& sol = record.solution;
    json decisions = json::array();
    for (const Placement& p : sol.decisions) {
        if (p.is_rejected())
            decisions.push_back(nullptr);
        else
            decisions.push_back({p.nodes().cpu, p.nodes().mem, p.nodes().sto});
    }
    json channels = json::array();
    for (const ChannelAssignment& a : sol.network.assignments)
        channels.push_back({{"channel", a.channel_id},
                            {"src", a.src},
                            {"dst", a.dst},
                            {"carried_gbps", round_sig6(a.carried_gbps)}});
    const ObjectiveBreakdown& b = sol.breakdown;
    return {{"run",
             {{"wavelengths", record.run.wavelengths},
              {"rate_gbps", round_sig6(record.run.rate_gbps)},
              {"scenario", record.run.scenario},
              {"mode", record.run.mode},
              {"runtime_s", round_sig6(record.run.runtime_s)}}},
            {"decisions", decisions},
            {"channels", channels},
            {"breakdown",
             {{"tnpc_w", round_sig6(b.tnpc_w)},
              {"tcpc_w", round_sig6(b.tcpc_w)},
              {"tra", b.tra},
              {"taw", b.taw},
              {"objective", round_sig6(b.objective)},
              {"nch_w", round_sig6(b.nch_w)},
              {"tor_w", round_sig6(b.tor_w)},
              {"onboard_w", round_sig6(b.onboard_w)}}},
            {"inactive_components", sol.inactive_components},
            {"optimal", sol.optimal}};
}

SolutionRecord solution_from_json(const json& doc) {
    SolutionRecord rec;
    try {
        const json& run = doc.at("run");
        rec.run.wavelengths = run.at("wavelengths").get<int>();
        rec.run.rate_gbps = run.at("rate_gbps").get<double>();
        rec.run.scenario = run.at("scenario").get<std::string>();
        rec.run.mode = run.at("mode").get<std::string>();
        rec.run.runtime_s = run.at("runtime_s").get<double>();

        Solution& sol = rec.solution;
        for (const json& d : doc.at("decisions")) {
            if (d.is_null())
                sol.decisions.push_back(Placement::rejected());
            else
                sol.decisions.push_back(Placement::on(d.at(0).get<int>(), d.at(1).get<int>(), d.at(2).get<int>()));
        }
        for (const json& c : doc.at("channels"))
            sol.network.assignments.push_back({c.at("channel").get<int>(), c.at("src").get<int>(),
                                               c.at("dst").get<int>(), c.at("carried_gbps").get<double>()});
        const json& b = doc.at("breakdown");
        sol.breakdown.tnpc_w = b.at("tnpc_w").get<double>();
        sol.breakdown.tcpc_w = b.at("tcpc_w").get<double>();
        sol.breakdown.tra = b.at("tra").get<int>();
        sol.breakdown.taw = b.at("taw").get<int>();
        sol.breakdown.objective = b.at("objective").get<double>();
        sol.breakdown.nch_w = b.at("nch_w").get<double>();
        sol.breakdown.tor_w = b.at("tor_w").get<double>();
        sol.breakdown.onboard_w = b.at("onboard_w").get<double>();
        sol.inactive_components = doc.at("inactive_components").get<int>();
        sol.optimal = doc.at("optimal").get<bool>();
    } catch (const json::exception& e) {
        throw ParseError("solution", e.what());
    }
    return rec;
}

void save_solution_file(const std::string& path, const SolutionRecord& record) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path);
    out << solution_to_json(record).dump(2) << "\n";
}

SolutionRecord load_solution_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("", "cannot open solution file " + path);
    try {
        return solution_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ParseError("", path + " is not valid JSON: " + e.what());
    }
}

std::string csv_header() {
    return "wavelengths,rate_gbps,scenario,mode,rejected,tcpc_w,tnpc_w,nch_w,tor_w,onboard_w,taw,"
           "inactive_components,objective,optimal,runtime_s";
}

std::string csv_row(const SolutionRecord& r) {
    const ObjectiveBreakdown& b = r.solution.breakdown;
    std::ostringstream os;
    os << r.run.wavelengths << ',' << format_sig6(r.run.rate_gbps) << ',' << r.run.scenario << ','
       << r.run.mode << ',' << b.tra << ',' << format_sig6(b.tcpc_w) << ',' << format_sig6(b.tnpc_w)
       << ',' << format_sig6(b.nch_w) << ',' << format_sig6(b.tor_w) << ','
       << format_sig6(b.onboard_w) << ',' << b.taw << ',' << r.solution.inactive_components << ','
       << format_sig6(b.objective) << ',' << (r.solution.optimal ? "true" : "false") << ','
       << format_sig6(r.run.runtime_s);
    return os.str();
}

std::string build_report(std::vector<SolutionRecord> records) {
    std::stable_sort(records.begin(), records.end(), [](const SolutionRecord& a, const SolutionRecord& b) {
        return std::tie(a.run.wavelengths, a.run.rate_gbps, a.run.scenario, a.run.mode) <
               std::tie(b.run.wavelengths, b.run.rate_gbps, b.run.scenario, b.run.mode);
    });
    std::string out = csv_header() + "\n";
    for (const SolutionRecord& r : records) out += csv_row(r) + "\n";
    return out;
}

} // namespace composable
