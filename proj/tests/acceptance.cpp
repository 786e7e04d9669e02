// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "composable/cli.hpp"
#include "composable/io.hpp"
#include "composable/solver.hpp"

using namespace composable;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    if (!v.pass) ++failures;
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(1);
    line << (v.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " -- " << v.detail << " ["
         << took.count() << " s]";
    std::cout << line.str() << std::endl;
}

Instance make(std::uint64_t seed, int nodes, int apps, int w, double r, Scenario s) {
    return {build_default_rack(nodes, w, r), generate_apps(seed, apps), scenario_weights(s)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// ---------------------------------------------------------------------------

Verdict node_capacity_table() {
    // Tbps per node; rows 50 and 100 Gb/s, columns 2..10 wavelengths.
    const double expected[2][5] = {{0.1, 0.2, 0.3, 0.4, 0.5}, {0.2, 0.4, 0.6, 0.8, 1.0}};
    const double rates[2] = {50, 100};
    int matched = 0;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 5; ++c)
            if (node_capacity_gbps(make_plan(2 * (c + 1), rates[r])) / 1000.0 == expected[r][c]) ++matched;
    return {matched == 10, std::to_string(matched) + "/10 cells exact"};
}

Verdict oracle_equivalence() {
    const int widths[2] = {2, 4};
    const double rates[2] = {50, 100};
    const Scenario scenarios[2] = {Scenario::one, Scenario::two};
    int same = 0;
    std::string first_miss;
    for (int k = 0; k < 100; ++k) {
        const auto seed = static_cast<std::uint64_t>(1000 + k);
        const Instance inst = make(seed, 3, 1 + k % 4, widths[k % 2], rates[(k / 2) % 2], scenarios[(k / 4) % 2]);
        const Solution bf = brute_force(inst);
        const Solution ex = solve_exact(inst, 60.0);
        if (ex.optimal && ex.decisions == bf.decisions && ex.breakdown.objective == bf.breakdown.objective)
            ++same;
        else if (first_miss.empty())
            first_miss = ", first mismatch at seed " + std::to_string(seed);
    }
    return {same == 100, std::to_string(same) + "/100 identical objective and decisions" + first_miss};
}

Verdict bottleneck_rejection() {
    for (std::uint64_t seed = 1; seed <= 500; ++seed) {
        for (int nodes : {2, 3}) {
            for (int apps : {2, 3}) {
                auto tra = [&](int w, double r) {
                    return brute_force(make(seed, nodes, apps, w, r, Scenario::one)).breakdown.tra;
                };
                const int narrow = tra(2, 50);
                if (narrow < 1) continue;
                const int wider = tra(4, 50);
                const int faster = tra(2, 100);
                if (wider == 0 && faster == 0)
                    return {true, "seed " + std::to_string(seed) + ", " + std::to_string(nodes) + " nodes, " +
                                      std::to_string(apps) + " apps: TRA " + std::to_string(narrow) +
                                      " at (2, 50), 0 at (4, 50) and (2, 100)"};
            }
        }
    }
    return {false, "no instance found in 500 seeds"};
}

Verdict scenario_contrast() {
    int cells = 0, holding = 0, more_splits = 0, more_idle = 0;
    std::string first_miss;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        for (int w : {2, 4}) {
            for (double r : {50.0, 100.0}) {
                const Solution one = brute_force(make(seed, 3, 4, w, r, Scenario::one));
                const Solution two = brute_force(make(seed, 3, 4, w, r, Scenario::two));
                ++cells;
                const bool ok = two.split_count() >= one.split_count() &&
                                two.inactive_components >= one.inactive_components &&
                                one.breakdown.tnpc_w <= two.breakdown.tnpc_w;
                if (ok) ++holding;
                else if (first_miss.empty()) first_miss = ", first violation at seed " + std::to_string(seed);
                if (two.split_count() > one.split_count()) ++more_splits;
                if (two.inactive_components > one.inactive_components) ++more_idle;
            }
        }
    }
    return {holding == cells && more_splits > 0,
            std::to_string(holding) + "/" + std::to_string(cells) + " cells hold; scenario II splits more in " +
                std::to_string(more_splits) + " and idles more components in " + std::to_string(more_idle) +
                first_miss};
}

Verdict monotonicity() {
    const int widths[5] = {2, 4, 6, 8, 10};
    int violations = 0, comparisons = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        for (Scenario s : {Scenario::one, Scenario::two}) {
            double obj[2][5];
            for (int ri = 0; ri < 2; ++ri)
                for (int wi = 0; wi < 5; ++wi) {
                    const Solution sol = solve_exact(make(seed, 3, 4, widths[wi], ri ? 100.0 : 50.0, s), 60.0);
                    if (!sol.optimal) ++violations;
                    obj[ri][wi] = sol.breakdown.objective;
                }
            for (int ri = 0; ri < 2; ++ri)
                for (int wi = 1; wi < 5; ++wi, ++comparisons)
                    if (obj[ri][wi] > obj[ri][wi - 1] + kObjectiveTolerance) ++violations;
            for (int wi = 0; wi < 5; ++wi, ++comparisons)
                if (obj[1][wi] > obj[0][wi] + kObjectiveTolerance) ++violations;
        }
    }
    return {violations == 0, std::to_string(comparisons) + " comparisons over 20 instances, " +
                                 std::to_string(violations) + " violations"};
}

std::vector<std::string> check_solution_file(const fs::path& file, const std::vector<Application>& apps) {
    std::vector<std::string> problems;
    const SolutionRecord rec = load_solution_file(file.string());
    const Instance inst{build_default_rack(9, rec.run.wavelengths, rec.run.rate_gbps), apps,
                        scenario_weights(parse_scenario(rec.run.scenario))};
    const Solution& sol = rec.solution;
    auto near = [](double a, double b) { return std::abs(a - b) <= 1e-5 * std::max(1.0, std::abs(b)); };

    const Evaluation e = evaluate(inst, sol.decisions);
    if (const auto* bad = std::get_if<Infeasible>(&e)) {
        problems.push_back(bad->constraint);
        return problems;
    }
    const Solution& again = std::get<Solution>(e);
    const auto flows = aggregate_flows(inst.rack, inst.apps, sol.decisions).inter_node;
    for (const std::string& v : validate_logical_network(sol.network, inst.rack.plan, flows, 9)) problems.push_back(v);
    const ObjectiveBreakdown& b = sol.breakdown;
    const SolverWeights& w = inst.weights;
    if (!near(b.tnpc_w, b.nch_w + b.tor_w + b.onboard_w)) problems.push_back("TNPC is not NCH + TOR + on-board");
    if (!near(b.objective, w.alpha1 * b.tnpc_w + w.alpha2 * b.tcpc_w + w.alpha3 * b.tra + w.alpha4 * b.taw))
        problems.push_back("objective does not match its terms");
    if (!near(b.objective, again.breakdown.objective) || b.tra != again.breakdown.tra)
        problems.push_back("stored breakdown differs from re-evaluation");
    if (sol.inactive_components != again.inactive_components) problems.push_back("inactive count differs");
    return problems;
}

// Runs the reference sweep and compares every output file with a second
// run: the frozen baseline when there is one, otherwise a fresh sweep.
Verdict reference_sweep(const fs::path& config, const fs::path& baseline, const fs::path& work) {
    fs::remove_all(work);
    const bool frozen = !baseline.empty() && fs::is_directory(baseline);
    std::ostringstream out, err;
    for (const char* run : {"first", "second"}) {
        if (frozen && std::string(run) == "second") break;
        const int code = run_command(
            {"sweep", "--config", config.string(), "--out-dir", (work / run).string(), "--no-timing"}, out, err);
        if (code != 0) return {false, std::string(run) + " sweep exited " + std::to_string(code) + ": " + err.str()};
    }
    const fs::path other = frozen ? baseline : work / "second";

    const std::vector<Application> apps = generate_apps(42, 15);
    int files = 0, valid = 0, identical = 0, optimal = 0, others = 0;
    std::string first_problem;
    for (const auto& entry : fs::directory_iterator(work / "first")) {
        const fs::path& p = entry.path();
        if (fs::exists(other / p.filename()) && slurp(p) == slurp(other / p.filename())) ++identical;
        if (p.extension() != ".json") continue;
        ++files;
        const auto problems = check_solution_file(p, apps);
        if (problems.empty()) ++valid;
        else if (first_problem.empty()) first_problem = ", " + p.filename().string() + ": " + problems.front();
        if (load_solution_file(p.string()).solution.optimal) ++optimal;
    }
    for (const auto& entry : fs::directory_iterator(other)) {
        (void)entry;
        ++others;
    }
    const bool ok = files == 20 && valid == 20 && identical == 21 && others == 21;
    return {ok, std::to_string(valid) + "/" + std::to_string(files) + " solutions valid, " +
                    std::to_string(identical) + "/21 files byte-identical to the " +
                    (frozen ? "frozen baseline" : "second run") + ", " + std::to_string(optimal) +
                    "/20 proven optimal" + first_problem};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::string config = COMPOSABLE_DATA_DIR "/seed42_sweep.json";
    std::string baseline = COMPOSABLE_DATA_DIR "/seed42";
    std::string work = (fs::temp_directory_path() / "composable_acceptance").string();
    app.add_option("--config", config, "Reference sweep configuration");
    app.add_option("--baseline", baseline, "Frozen outputs of the reference sweep (empty: run it twice)");
    app.add_option("--work-dir", work, "Where the reference sweeps are written");
    CLI11_PARSE(app, argc, argv);

    report(1, "node capacity table", node_capacity_table);
    report(2, "exact search matches brute force", oracle_equivalence);
    report(3, "rejection from the wavelength bottleneck", bottleneck_rejection);
    report(4, "scenario I vs II contrast", scenario_contrast);
    report(5, "objective monotone in W and R", monotonicity);
    report(6, "reference sweep validity and determinism", [&] { return reference_sweep(config, baseline, work); });
    report(7, "non-reproducibility statement", [] {
        return Verdict{true,
                       "absolute bar-chart values and the quoted TCPC reductions depend on an unpublished "
                       "random instance and are not reproduced; criteria 3-5 check the trends and the "
                       "seed-42 sweep serves only as a regression baseline"};
    });
    return failures;
}
