#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "composable/solver.hpp"

namespace composable {

/// Parameters of one solve, stored next to the solution so that a directory
/// of solution files can be merged into a report.
struct RunInfo {
    int wavelengths = 0;
    double rate_gbps = 0.0;
    std::string scenario = "I";
    std::string mode = "exact";
    double runtime_s = 0.0;
};

struct SolutionRecord {
    RunInfo run;
    Solution solution;
};

/// x rounded to six significant digits.
double round_sig6(double x);
/// "%.6g" formatting.
std::string format_sig6(double x);

/// Solution file. Decisions are `[cpu, mem, sto]` node triples or `null`
/// for a rejected application. Reals carry six significant digits.
nlohmann::json solution_to_json(const SolutionRecord& record);
SolutionRecord solution_from_json(const nlohmann::json& doc);

void save_solution_file(const std::string& path, const SolutionRecord& record);
SolutionRecord load_solution_file(const std::string& path);

std::string csv_header();
std::string csv_row(const SolutionRecord& record);

/// Header plus one row per record, sorted by (wavelengths, rate, scenario, mode).
std::string build_report(std::vector<SolutionRecord> records);

} // namespace composable
