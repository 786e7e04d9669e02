#include <doctest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "composable/cli.hpp"
#include "composable/io.hpp"

using namespace composable;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

class Scratch {
public:
    explicit Scratch(const std::string& name) : dir_(fs::temp_directory_path() / name) {
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Scratch() { fs::remove_all(dir_); }
    fs::path operator/(const std::string& leaf) const { return dir_ / leaf; }
    std::string str(const std::string& leaf) const { return (dir_ / leaf).string(); }

private:
    fs::path dir_;
};

std::size_t line_count(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

} // namespace

TEST_CASE("generate writes a seeded workload") {
    Scratch tmp("composable_cli_generate");
    const Result r = run({"generate", "--seed", "42", "--apps", "15", "--out", tmp.str("apps.json")});
    CHECK(r.code == exit_code::ok);
    CHECK(load_workload_file(tmp.str("apps.json")) == generate_apps(42, 15));
    const std::string first = slurp(tmp / "apps.json");
    CHECK(run({"generate", "--seed", "42", "--apps", "15", "--out", tmp.str("apps.json")}).code == 0);
    CHECK(slurp(tmp / "apps.json") == first);
}

TEST_CASE("solve writes a self-consistent solution") {
    Scratch tmp("composable_cli_solve");
    save_workload_file(tmp.str("apps.json"), generate_apps(42, 15));
    const Result r = run({"solve", "--workload", tmp.str("apps.json"), "--wavelengths", "2", "--rate", "50",
                          "--scenario", "I", "--mode", "greedy", "--out", tmp.str("sol.json")});
    // The reference workload cannot be fully accepted at two wavelengths.
    CHECK(r.code == exit_code::rejected_apps);
    const SolutionRecord rec = load_solution_file(tmp.str("sol.json"));
    CHECK(rec.run.wavelengths == 2);
    CHECK(rec.run.mode == "greedy");
    CHECK(rec.solution.breakdown.tra > 0);

    const Instance inst{build_default_rack(9, 2, 50), generate_apps(42, 15), scenario_weights(Scenario::one)};
    const Evaluation e = evaluate(inst, rec.solution.decisions);
    REQUIRE(std::holds_alternative<Solution>(e));
    const ObjectiveBreakdown& b = std::get<Solution>(e).breakdown;
    CHECK(b.objective == doctest::Approx(rec.solution.breakdown.objective).epsilon(1e-5));
    CHECK(b.tnpc_w == doctest::Approx(rec.solution.breakdown.tnpc_w).epsilon(1e-5));
    CHECK(b.tra == rec.solution.breakdown.tra);
}

TEST_CASE("solve exits 0 when everything is accepted") {
    Scratch tmp("composable_cli_solve_ok");
    save_workload_file(tmp.str("apps.json"), generate_apps(3, 3));
    spit(tmp / "rack.json", R"({"nodes": 3, "wavelengths": 4, "rate_gbps": 100})");
    const Result r = run({"solve", "--rack", tmp.str("rack.json"), "--workload", tmp.str("apps.json"), "--scenario",
                          "II", "--mode", "brute", "--out", tmp.str("sol.json"), "--no-timing"});
    CHECK(r.code == exit_code::ok);
    CHECK(r.out.find("optimal") != std::string::npos);
    const SolutionRecord rec = load_solution_file(tmp.str("sol.json"));
    CHECK(rec.run.wavelengths == 4);
    CHECK(rec.run.rate_gbps == 100.0);
    CHECK(rec.run.runtime_s == 0.0);
    CHECK(rec.solution.optimal);
}

TEST_CASE("--no-timing output is byte-identical across runs") {
    Scratch tmp("composable_cli_repeat");
    save_workload_file(tmp.str("apps.json"), generate_apps(8, 4));
    spit(tmp / "rack.json", R"({"nodes": 3})");
    const std::vector<std::string> args{"solve",     "--rack", tmp.str("rack.json"), "--workload",
                                        tmp.str("apps.json"), "--mode", "exact", "--budget", "5",
                                        "--no-timing", "--out"};
    auto a = args, b = args;
    a.push_back(tmp.str("a.json"));
    b.push_back(tmp.str("b.json"));
    CHECK(run(a).code != exit_code::invalid_input);
    CHECK(run(b).code != exit_code::invalid_input);
    CHECK(slurp(tmp / "a.json") == slurp(tmp / "b.json"));
}

TEST_CASE("sweep covers the default grid and report merges it") {
    Scratch tmp("composable_cli_sweep");
    spit(tmp / "sweep.json", R"({"rack": {"nodes": 3}, "seed": 42, "apps": 4, "budget_seconds": 5})");
    const Result r = run({"sweep", "--config", tmp.str("sweep.json"), "--out-dir", tmp.str("out"), "--no-timing",
                          "--jobs", "2"});
    REQUIRE(r.code == exit_code::ok);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(tmp / "out"))
        if (entry.path().extension() == ".json") ++files;
    CHECK(files == 20);
    CHECK(fs::exists(tmp / "out" / "w10_r100_sII_exact.json"));

    const std::string csv = slurp(tmp / "out" / "report.csv");
    CHECK(csv.rfind(csv_header() + "\n", 0) == 0);
    CHECK(line_count(csv) == 21);
    CHECK(csv.find("\n2,50,I,exact,") != std::string::npos);

    const Result rep = run({"report", "--in-dir", tmp.str("out"), "--out", tmp.str("merged.csv")});
    CHECK(rep.code == exit_code::ok);
    CHECK(slurp(tmp / "merged.csv") == csv);

    // Same inputs, one job: identical bytes.
    CHECK(run({"sweep", "--config", tmp.str("sweep.json"), "--out-dir", tmp.str("again"), "--no-timing"}).code == 0);
    CHECK(slurp(tmp / "again" / "report.csv") == csv);
    CHECK(slurp(tmp / "again" / "w2_r50_sI_exact.json") == slurp(tmp / "out" / "w2_r50_sI_exact.json"));
}

TEST_CASE("sweep honours explicit lists") {
    Scratch tmp("composable_cli_sweep_lists");
    save_workload_file(tmp.str("apps.json"), generate_apps(5, 3));
    spit(tmp / "sweep.json", R"({"rack": {"nodes": 2}, "workload": "apps.json", "wavelengths": [2, 6],
                                 "rates": [50], "scenarios": ["II"], "mode": "greedy"})");
    REQUIRE(run({"sweep", "--config", tmp.str("sweep.json"), "--out-dir", tmp.str("out")}).code == 0);
    CHECK(line_count(slurp(tmp / "out" / "report.csv")) == 3);
    CHECK(fs::exists(tmp / "out" / "w6_r50_sII_greedy.json"));
}

TEST_CASE("invalid input exits 2 and names the problem") {
    Scratch tmp("composable_cli_errors");
    CHECK(run({}).code == exit_code::invalid_input);
    CHECK(run({"frobnicate"}).code == exit_code::invalid_input);
    CHECK(run({"generate", "--seed", "1", "--apps", "3", "--out", tmp.str("a.json"), "--colour", "red"}).code ==
          exit_code::invalid_input);
    CHECK(run({"generate", "--seed", "1", "--out", tmp.str("a.json")}).code == exit_code::invalid_input);

    spit(tmp / "bad.json", R"([{"id":0,"cpu_ghz":0.9,"mem_gb":3.6,"sto_gb":80,"cm_gbps":900,"cd_gbps":5}])");
    const Result bad = run({"solve", "--workload", tmp.str("bad.json"), "--out", tmp.str("s.json")});
    CHECK(bad.code == exit_code::invalid_input);
    CHECK(bad.err.find("cm_gbps") != std::string::npos);

    save_workload_file(tmp.str("apps.json"), generate_apps(1, 2));
    const Result odd = run({"solve", "--workload", tmp.str("apps.json"), "--wavelengths", "3", "--out",
                            tmp.str("s.json")});
    CHECK(odd.code == exit_code::invalid_input);
    CHECK(odd.err.find("wavelengths") != std::string::npos);
    CHECK(run({"solve", "--workload", tmp.str("apps.json"), "--scenario", "III", "--out", tmp.str("s.json")}).code ==
          exit_code::invalid_input);
    CHECK(run({"solve", "--workload", tmp.str("apps.json"), "--budget", "0", "--out", tmp.str("s.json")}).code ==
          exit_code::invalid_input);

    // Brute force refuses a 9-node rack.
    const Result big = run({"solve", "--workload", tmp.str("apps.json"), "--mode", "brute", "--out",
                            tmp.str("s.json")});
    CHECK(big.code == exit_code::invalid_input);
    CHECK(big.err.find("brute force") != std::string::npos);

    spit(tmp / "sweep.json", R"({"wavelenghts": [2]})");
    const Result typo = run({"sweep", "--config", tmp.str("sweep.json"), "--out-dir", tmp.str("out")});
    CHECK(typo.code == exit_code::invalid_input);
    CHECK(typo.err.find("wavelenghts") != std::string::npos);

    CHECK(run({"report", "--in-dir", tmp.str("missing"), "--out", tmp.str("r.csv")}).code ==
          exit_code::invalid_input);
}

TEST_CASE("executable exit codes") {
    Scratch tmp("composable_cli_process");
    const std::string exe = COMPOSABLE_CLI_PATH;
    const std::string apps = tmp.str("apps.json");
    auto status = [](const std::string& cmd) {
        const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status(exe + " generate --seed 42 --apps 15 --out " + apps) == 0);
    CHECK(status(exe + " solve --workload " + apps + " --mode greedy --out " + tmp.str("s.json")) == 1);
    CHECK(status(exe + " solve --workload " + apps + " --bogus --out " + tmp.str("s.json")) == 2);
    CHECK(status(exe + " --help") == 0);
}
