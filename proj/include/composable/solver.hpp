#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "composable/placement.hpp"
#include "composable/power.hpp"
#include "composable/rwa.hpp"
#include "composable/topology.hpp"
#include "composable/workload.hpp"

namespace composable {

using SolverWeights = ObjectiveWeights;

enum class Scenario { one, two };

/// Scenario I: (1, 1, 1e5, 1). Scenario II discounts network power: (1e-3, 1, 1e5, 1).
SolverWeights scenario_weights(Scenario s) noexcept;
Scenario parse_scenario(std::string_view text); ///< "I" or "II"
std::string_view to_string(Scenario s) noexcept;

struct Instance {
    RackTopology rack;
    std::vector<Application> apps;
    SolverWeights weights;
};

struct Solution {
    Decisions decisions;
    LogicalNetwork network;
    ObjectiveBreakdown breakdown;
    bool optimal = false;
    int inactive_components = 0;

    int split_count() const noexcept;
};

/// Why a decision vector cannot be realized (as opposed to rejecting apps).
struct Infeasible {
    std::string constraint;
};

using Evaluation = std::variant<Solution, Infeasible>;

/// Objectives within this absolute distance are ties, broken by the
/// lexicographically smaller decision vector.
inline constexpr double kObjectiveTolerance = 1e-9;

/// True when (a_obj, a) should replace the incumbent (b_obj, b).
bool better_than(double a_obj, std::span<const Placement> a, double b_obj,
                 std::span<const Placement> b) noexcept;

/// Checks capacities, routes flows, assigns channels and prices the result.
/// `optimal` is left false.
Evaluation evaluate(const Instance& instance, std::span<const Placement> decisions);

/// Every placement option for one application on an `num_nodes` rack in
/// branching order: colocated (by node), split triples (lexicographic), Rejected.
std::vector<Placement> placement_options(int num_nodes);

struct BruteForceLimits {
    int max_apps = 5;
    int max_nodes = 3;
};

/// Exhaustive enumeration of all (N^3 + 1)^|apps| decision vectors.
Solution brute_force(const Instance& instance, BruteForceLimits limits = {});

/// Prefix cost plus, for each undecided app, the cheaper of rejecting it or
/// its dynamic compute power and single on-board traversal of its flows.
/// +infinity when the prefix itself is infeasible.
double lower_bound(const Instance& instance, std::span<const Placement> prefix);

/// lower_bound strengthened with the idle power of the components the
/// remaining demand must switch on. This is what solve_exact prunes with.
double search_bound(const Instance& instance, std::span<const Placement> prefix);

struct ExactOptions {
    double budget_seconds = 600.0;
    /// Node expansions granted per budget second. The budget is spent in
    /// expansions, not wall-clock time, so results never depend on timing.
    double nodes_per_second = 5.0e5;
    /// Seed the incumbent with solve_greedy and with searches over narrower
    /// pools at the same rate (charged to the same allowance).
    bool warm_start = true;
    /// Finished subtrees remembered for detecting repeated states.
    std::size_t table_entries = std::size_t{1} << 20;
};

struct ExactStats {
    std::uint64_t nodes = 0;
    bool completed = false;
};

Solution solve_exact(const Instance& instance, double budget_seconds);
Solution solve_exact(const Instance& instance, const ExactOptions& options, ExactStats* stats = nullptr);

/// First-fit-decreasing colocation, then split placement of leftovers in
/// ascending order of total inter-resource traffic, then rejection.
Solution solve_greedy(const Instance& instance);

} // namespace composable
