#include "composable/cli.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "composable/errors.hpp"
#include "composable/io.hpp"
#include "composable/solver.hpp"

namespace composable {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class Mode { exact, greedy, brute };

Mode parse_mode(const std::string& text) {
    if (text == "exact") return Mode::exact;
    if (text == "greedy") return Mode::greedy;
    if (text == "brute") return Mode::brute;
    throw ParseError("mode", "must be exact, greedy or brute, got '" + text + "'");
}

struct CaseSpec {
    int wavelengths = 2;
    double rate_gbps = 50.0;
    std::string scenario = "I";
    std::string mode = "exact";
    double budget_seconds = 600.0;
};

SolutionRecord run_case(const RackTopology& base, const std::vector<Application>& apps,
                        const CaseSpec& spec, bool timing) {
    Instance instance{with_plan(base, spec.wavelengths, spec.rate_gbps), apps,
                      scenario_weights(parse_scenario(spec.scenario))};
    const auto start = std::chrono::steady_clock::now();
    Solution sol;
    switch (parse_mode(spec.mode)) {
    case Mode::exact: sol = solve_exact(instance, spec.budget_seconds); break;
    case Mode::greedy: sol = solve_greedy(instance); break;
    case Mode::brute: sol = brute_force(instance); break;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return {{spec.wavelengths, spec.rate_gbps, spec.scenario, spec.mode, timing ? elapsed.count() : 0.0},
            std::move(sol)};
}

std::string cell_file_name(const CaseSpec& spec) {
    return "w" + std::to_string(spec.wavelengths) + "_r" + format_sig6(spec.rate_gbps) + "_s" +
           spec.scenario + "_" + spec.mode + ".json";
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << text;
}

// ---------------------------------------------------------------------------

struct SweepConfig {
    RackTopology rack;
    std::vector<Application> apps;
    std::vector<int> wavelengths{2, 4, 6, 8, 10};
    std::vector<double> rates{50.0, 100.0};
    std::vector<std::string> scenarios{"I", "II"};
    std::string mode = "exact";
    double budget_seconds = 600.0;
    int jobs = 1;
};

fs::path resolve(const fs::path& base_dir, const std::string& ref) {
    const fs::path p(ref);
    return p.is_absolute() ? p : base_dir / p;
}

template <class T>
std::vector<T> nonempty_list(const json& doc, const char* key) {
    const json& v = doc.at(key);
    if (!v.is_array() || v.empty()) throw ParseError(key, "expected a non-empty array");
    try {
        return v.get<std::vector<T>>();
    } catch (const json::exception&) {
        throw ParseError(key, "array holds values of the wrong type");
    }
}

SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("", "cannot open sweep config " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("", std::string("sweep config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("", "sweep config must be a JSON object");
    static const std::set<std::string> known{"rack", "workload", "seed", "apps", "wavelengths", "rates",
                                             "scenarios", "mode", "budget_seconds", "jobs"};
    for (const auto& [key, _] : doc.items())
        if (!known.contains(key)) throw ParseError(key, "unknown sweep configuration key");

    const fs::path dir = fs::path(path).parent_path();
    SweepConfig cfg;
    if (!doc.contains("rack")) {
        cfg.rack = build_default_rack(9, 2, 50.0);
    } else if (doc.at("rack").is_string()) {
        cfg.rack = load_rack_file(resolve(dir, doc.at("rack").get<std::string>()).string());
    } else {
        cfg.rack = rack_from_json(doc.at("rack"));
    }

    if (doc.contains("workload")) {
        if (!doc.at("workload").is_string()) throw ParseError("workload", "expected a file path");
        cfg.apps = load_workload_file(resolve(dir, doc.at("workload").get<std::string>()).string());
    } else {
        const json seed = doc.value("seed", json(42));
        const json count = doc.value("apps", json(15));
        if (!seed.is_number_unsigned()) throw ParseError("seed", "expected a non-negative integer");
        if (!count.is_number_integer() || count.get<int>() < 0)
            throw ParseError("apps", "expected a non-negative integer");
        cfg.apps = generate_apps(seed.get<std::uint64_t>(), count.get<int>());
    }

    if (doc.contains("wavelengths")) cfg.wavelengths = nonempty_list<int>(doc, "wavelengths");
    if (doc.contains("rates")) cfg.rates = nonempty_list<double>(doc, "rates");
    if (doc.contains("scenarios")) cfg.scenarios = nonempty_list<std::string>(doc, "scenarios");
    for (int w : cfg.wavelengths)
        if (w < 2 || w % 2 != 0) throw ParseError("wavelengths", "entries must be even and at least 2");
    for (double r : cfg.rates)
        if (!(r > 0.0)) throw ParseError("rates", "entries must be positive");
    for (const std::string& s : cfg.scenarios)
        if (s != "I" && s != "II") throw ParseError("scenarios", "entries must be I or II");
    if (doc.contains("mode")) {
        if (!doc.at("mode").is_string()) throw ParseError("mode", "expected a string");
        cfg.mode = doc.at("mode").get<std::string>();
        parse_mode(cfg.mode);
    }
    if (doc.contains("budget_seconds")) {
        if (!doc.at("budget_seconds").is_number() || !(doc.at("budget_seconds").get<double>() > 0.0))
            throw ParseError("budget_seconds", "expected a positive number");
        cfg.budget_seconds = doc.at("budget_seconds").get<double>();
    }
    if (doc.contains("jobs")) {
        if (!doc.at("jobs").is_number_integer() || doc.at("jobs").get<int>() < 1)
            throw ParseError("jobs", "expected a positive integer");
        cfg.jobs = doc.at("jobs").get<int>();
    }
    return cfg;
}

std::vector<SolutionRecord> run_sweep(const SweepConfig& cfg, const fs::path& out_dir, int jobs,
                                      bool timing) {
    std::vector<CaseSpec> cases;
    for (int w : cfg.wavelengths)
        for (double r : cfg.rates)
            for (const std::string& s : cfg.scenarios)
                cases.push_back({w, r, s, cfg.mode, cfg.budget_seconds});

    std::vector<std::optional<SolutionRecord>> results(cases.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
            try {
                results[i] = run_case(cfg.rack, cfg.apps, cases[i], timing);
                save_solution_file((out_dir / cell_file_name(cases[i])).string(), *results[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(cases.size())));
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (failure) std::rethrow_exception(failure);

    std::vector<SolutionRecord> out;
    out.reserve(results.size());
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
}

std::vector<SolutionRecord> load_run_directory(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ParseError("in-dir", dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<SolutionRecord> records;
    for (const fs::path& f : files) records.push_back(load_solution_file(f.string()));
    return records;
}

} // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Placement, wavelength assignment and power study for a composable rack"};
    app.require_subcommand(1);

    std::uint64_t seed = 42;
    int app_count = 15;
    std::string gen_out;
    auto* generate = app.add_subcommand("generate", "Generate a seeded workload file");
    generate->add_option("--seed", seed, "PRNG seed")->required();
    generate->add_option("--apps", app_count, "Number of applications")->required()->check(CLI::NonNegativeNumber);
    generate->add_option("--out", gen_out, "Workload JSON to write")->required();

    std::string rack_path, workload_path, solve_out;
    std::optional<int> wavelengths;
    std::optional<double> rate;
    CaseSpec spec;
    bool solve_no_timing = false;
    auto* solve = app.add_subcommand("solve", "Solve one case");
    solve->add_option("--rack", rack_path, "Rack JSON (default: 9 default nodes)");
    solve->add_option("--workload", workload_path, "Workload JSON")->required();
    solve->add_option("--wavelengths", wavelengths, "Channels in the rack pool");
    solve->add_option("--rate", rate, "Per-channel rate in Gb/s");
    solve->add_option("--scenario", spec.scenario, "I or II")->check(CLI::IsMember({"I", "II"}));
    solve->add_option("--mode", spec.mode, "exact, greedy or brute")
        ->check(CLI::IsMember({"exact", "greedy", "brute"}));
    solve->add_option("--budget", spec.budget_seconds, "Exact-search budget in seconds")
        ->check(CLI::PositiveNumber);
    solve->add_option("--out", solve_out, "Solution JSON to write")->required();
    solve->add_flag("--no-timing", solve_no_timing, "Write runtime_s as 0");

    std::string config_path, out_dir;
    std::optional<int> jobs;
    bool sweep_no_timing = false;
    auto* sweep = app.add_subcommand("sweep", "Solve the wavelength x rate x scenario grid");
    sweep->add_option("--config", config_path, "Sweep JSON")->required();
    sweep->add_option("--out-dir", out_dir, "Directory for solution files and report.csv")->required();
    sweep->add_option("--jobs", jobs, "Parallel cases")->check(CLI::PositiveNumber);
    sweep->add_flag("--no-timing", sweep_no_timing, "Write runtime_s as 0");

    std::string in_dir, report_out;
    auto* report = app.add_subcommand("report", "Merge solution files into one CSV");
    report->add_option("--in-dir", in_dir, "Directory of solution files")->required();
    report->add_option("--out", report_out, "CSV to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::ok : exit_code::invalid_input;
    }

    try {
        if (generate->parsed()) {
            save_workload_file(gen_out, generate_apps(seed, app_count));
            out << "wrote " << app_count << " applications to " << gen_out << "\n";
            return exit_code::ok;
        }
        if (solve->parsed()) {
            const RackTopology rack = rack_path.empty() ? build_default_rack(9, 2, 50.0) : load_rack_file(rack_path);
            const std::vector<Application> apps = load_workload_file(workload_path);
            spec.wavelengths = wavelengths.value_or(rack.plan.num_channels);
            spec.rate_gbps = rate.value_or(rack.plan.channel_rate_gbps);
            if (spec.wavelengths < 2 || spec.wavelengths % 2 != 0)
                throw ParseError("wavelengths", "must be even and at least 2");
            if (!(spec.rate_gbps > 0.0)) throw ParseError("rate", "must be positive");
            const SolutionRecord rec = run_case(rack, apps, spec, !solve_no_timing);
            save_solution_file(solve_out, rec);
            const ObjectiveBreakdown& b = rec.solution.breakdown;
            out << "objective " << format_sig6(b.objective) << " rejected " << b.tra << " taw " << b.taw
                << (rec.solution.optimal ? " optimal" : "") << "\n";
            return b.tra > 0 ? exit_code::rejected_apps : exit_code::ok;
        }
        if (sweep->parsed()) {
            const SweepConfig cfg = load_sweep_config(config_path);
            fs::create_directories(out_dir);
            const auto records = run_sweep(cfg, out_dir, jobs.value_or(cfg.jobs), !sweep_no_timing);
            write_text(fs::path(out_dir) / "report.csv", build_report(records));
            out << "wrote " << records.size() << " solutions and report.csv to " << out_dir << "\n";
            return exit_code::ok;
        }
        if (report->parsed()) {
            const auto records = load_run_directory(in_dir);
            write_text(report_out, build_report(records));
            out << "wrote " << records.size() << " rows to " << report_out << "\n";
            return exit_code::ok;
        }
    } catch (const ParseError& e) {
        err << "invalid input: " << e.what() << "\n";
        return exit_code::invalid_input;
    } catch (const SizeError& e) {
        err << "invalid input: " << e.what() << "\n";
        return exit_code::invalid_input;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::invalid_input;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::invalid_input;
    }
    return exit_code::invalid_input;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("composable");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_command(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace composable
