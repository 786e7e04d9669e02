#include "composable/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "composable/errors.hpp"
#include "search_state.hpp"
#include "units.hpp"

namespace composable {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

SolverWeights scenario_weights(Scenario s) noexcept {
    switch (s) {
    case Scenario::one: return {1.0, 1.0, 1e5, 1.0};
    case Scenario::two: return {1e-3, 1.0, 1e5, 1.0};
    }
    return {};
}

Scenario parse_scenario(std::string_view text) {
    if (text == "I") return Scenario::one;
    if (text == "II") return Scenario::two;
    throw InvalidArgument("scenario must be I or II, got '" + std::string(text) + "'");
}

std::string_view to_string(Scenario s) noexcept {
    return s == Scenario::one ? "I" : "II";
}

int Solution::split_count() const noexcept {
    return static_cast<int>(
        std::count_if(decisions.begin(), decisions.end(), [](const Placement& p) { return p.is_split(); }));
}

bool better_than(double a_obj, std::span<const Placement> a, double b_obj,
                 std::span<const Placement> b) noexcept {
    if (a_obj < b_obj - kObjectiveTolerance) return true;
    if (a_obj > b_obj + kObjectiveTolerance) return false;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Evaluation evaluate(const Instance& instance, std::span<const Placement> decisions) {
    const RackTopology& rack = instance.rack;
    if (decisions.size() != instance.apps.size())
        throw InvalidArgument("evaluate needs one decision per application (" +
                              std::to_string(instance.apps.size()) + "), got " +
                              std::to_string(decisions.size()));

    std::vector<std::array<double, 3>> loads;
    try {
        loads = component_loads(rack, instance.apps, decisions);
    } catch (const CapacityViolation& e) {
        return Infeasible{std::string("capacity: ") + e.what()};
    }

    const FlowAggregate flows = aggregate_flows(rack, instance.apps, decisions);
    ChannelResult routed = assign_channels(flows.inter_node, rack.plan, rack.num_nodes(), flows.intra_node_bps);
    if (const auto* deficit = std::get_if<ChannelDeficit>(&routed))
        return Infeasible{"channels: " + std::to_string(deficit->needed) + " needed, " +
                          std::to_string(deficit->available) + " in the pool"};

    Solution sol;
    sol.decisions.assign(decisions.begin(), decisions.end());
    sol.network = std::move(std::get<LogicalNetwork>(routed));
    sol.breakdown = aggregate_power(rack, instance.apps, decisions, sol.network, instance.weights);
    for (const auto& node : loads)
        for (double l : node)
            if (l == 0.0) ++sol.inactive_components;
    return sol;
}

std::vector<Placement> placement_options(int num_nodes) {
    std::vector<Placement> out;
    out.reserve(static_cast<std::size_t>(num_nodes * num_nodes * num_nodes + 1));
    for (int n = 0; n < num_nodes; ++n) out.push_back(Placement::colocated(n));
    for (int c = 0; c < num_nodes; ++c)
        for (int m = 0; m < num_nodes; ++m)
            for (int s = 0; s < num_nodes; ++s)
                if (!(c == m && m == s)) out.push_back(Placement::on(c, m, s));
    out.push_back(Placement::rejected());
    return out;
}

Solution brute_force(const Instance& instance, BruteForceLimits limits) {
    const int n = instance.rack.num_nodes();
    const auto napps = instance.apps.size();
    if (static_cast<int>(napps) > limits.max_apps || n > limits.max_nodes)
        throw SizeError("brute force limited to " + std::to_string(limits.max_apps) + " apps and " +
                        std::to_string(limits.max_nodes) + " nodes, instance has " +
                        std::to_string(napps) + " apps and " + std::to_string(n) + " nodes");

    // Lexicographic enumeration; only a strictly better objective replaces the
    // incumbent, so the first optimum met is the lexicographically smallest.
    // Prefixes that already overcommit a component are skipped whole.
    std::vector<Placement> options = placement_options(n);
    std::sort(options.begin(), options.end());

    std::vector<std::int64_t> cap(static_cast<std::size_t>(n) * 3), load(cap.size(), 0);
    for (const Node& node : instance.rack.nodes)
        for (std::size_t k = 0; k < 3; ++k)
            cap[static_cast<std::size_t>(node.id) * 3 + k] = detail::to_milli(node.components[k].capacity);
    std::vector<std::array<std::int64_t, 3>> demand;
    for (const Application& a : instance.apps)
        demand.push_back({detail::to_milli(a.cpu_ghz), detail::to_milli(a.mem_gb), detail::to_milli(a.sto_gb)});

    Decisions current(napps, options.front());
    Solution best;
    double best_obj = kInf;
    auto visit = [&](auto& self, std::size_t depth) -> void {
        if (depth == napps) {
            Evaluation e = evaluate(instance, current);
            if (auto* sol = std::get_if<Solution>(&e)) {
                if (sol->breakdown.objective < best_obj - kObjectiveTolerance) {
                    best_obj = sol->breakdown.objective;
                    best = std::move(*sol);
                }
            }
            return;
        }
        for (const Placement& p : options) {
            current[depth] = p;
            if (p.is_rejected()) {
                self(self, depth + 1);
                continue;
            }
            const int hosts[3] = {p.nodes().cpu, p.nodes().mem, p.nodes().sto};
            bool fits = true;
            for (std::size_t k = 0; k < 3; ++k) {
                const std::size_t slot = static_cast<std::size_t>(hosts[k]) * 3 + k;
                if (load[slot] + demand[depth][k] > cap[slot]) fits = false;
            }
            if (!fits) continue;
            for (std::size_t k = 0; k < 3; ++k) load[static_cast<std::size_t>(hosts[k]) * 3 + k] += demand[depth][k];
            self(self, depth + 1);
            for (std::size_t k = 0; k < 3; ++k) load[static_cast<std::size_t>(hosts[k]) * 3 + k] -= demand[depth][k];
        }
    };
    visit(visit, 0);
    best.optimal = true;
    return best;
}

double lower_bound(const Instance& instance, std::span<const Placement> prefix) {
    if (prefix.size() > instance.apps.size())
        throw InvalidArgument("prefix longer than the application list");
    Instance head{instance.rack, {instance.apps.begin(), instance.apps.begin() + static_cast<std::ptrdiff_t>(prefix.size())},
                  instance.weights};
    const Evaluation e = evaluate(head, prefix);
    const auto* sol = std::get_if<Solution>(&e);
    if (!sol) return kInf;
    double rest = 0.0;
    for (std::size_t j = prefix.size(); j < instance.apps.size(); ++j)
        rest += std::min(instance.weights.alpha3,
                         detail::optimistic_app_cost(instance.rack, instance.apps[j], instance.weights));
    return sol->breakdown.objective + rest;
}

double search_bound(const Instance& instance, std::span<const Placement> prefix) {
    if (prefix.size() > instance.apps.size())
        throw InvalidArgument("prefix longer than the application list");
    detail::SearchState state(instance);
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (!state.try_apply(static_cast<int>(i), prefix[i])) return kInf;
    return state.bound(static_cast<int>(prefix.size()), true);
}

namespace {

Solution realize(const Instance& instance, const Decisions& decisions) {
    Evaluation e = evaluate(instance, decisions);
    if (auto* sol = std::get_if<Solution>(&e)) return std::move(*sol);
    throw Error("internal: search produced an infeasible decision vector (" +
                std::get<Infeasible>(e).constraint + ")");
}

class BranchAndBound {
public:
    BranchAndBound(const Instance& instance, std::uint64_t node_limit, std::size_t table_limit)
        : state_(instance),
          napps_(static_cast<int>(instance.apps.size())),
          nnodes_(instance.rack.num_nodes()),
          current_(instance.apps.size()),
          node_limit_(node_limit),
          table_limit_(nnodes_ < 255 ? table_limit : 0) {}

    void seed(const Decisions& decisions) {
        detail::SearchState replay = state_;
        for (int i = 0; i < napps_; ++i)
            if (!replay.try_apply(i, decisions[static_cast<std::size_t>(i)])) return;
        const double c = replay.cost();
        if (best_.empty() || better_than(c, decisions, best_cost_, best_)) {
            best_ = decisions;
            best_cost_ = c;
        }
    }

    void run() { descend(0); }

    const Decisions& best() const noexcept { return best_; }
    bool completed() const noexcept { return !aborted_; }
    std::uint64_t nodes() const noexcept { return nodes_; }

private:
    // Children in branching order; capacity and symmetry are checked per
    // coordinate so infeasible split triples are never generated.
    void descend(int i) {
        if (i == napps_) {
            const double c = state_.cost();
            if (better_than(c, current_, best_cost_, best_)) {
                best_ = current_;
                best_cost_ = c;
            }
            return;
        }
        auto fits = [&](int node, std::size_t kind) { return state_.fits(i, node, kind); };
        for (int n = 0; n < nnodes_ && !aborted_; ++n)
            if (state_.may_open(n, -1, -1) && fits(n, 0) && fits(n, 1) && fits(n, 2))
                visit(i, Placement::colocated(n));
        for (int c = 0; c < nnodes_ && !aborted_; ++c) {
            if (!fits(c, 0) || !state_.may_open(c, -1, -1)) continue;
            for (int m = 0; m < nnodes_ && !aborted_; ++m) {
                if (!fits(m, 1) || !state_.may_open(m, c, -1)) continue;
                for (int s = 0; s < nnodes_ && !aborted_; ++s) {
                    if (c == m && m == s) continue;
                    if (!fits(s, 2) || !state_.may_open(s, c, m)) continue;
                    visit(i, Placement::on(c, m, s));
                }
            }
        }
        if (!aborted_) visit(i, Placement::rejected());
    }

    void visit(int i, const Placement& p) {
        if (!state_.try_apply(i, p)) return;
        if (nodes_ == node_limit_) {
            aborted_ = true;
            state_.undo(i, p);
            return;
        }
        ++nodes_;
        current_[static_cast<std::size_t>(i)] = p;
        // Byte string ordered like the decision prefix (Rejected sorts last).
        path_.resize(static_cast<std::size_t>(i) * 3);
        if (p.is_rejected()) {
            path_.append(3, '\xff');
        } else {
            path_.push_back(static_cast<char>(p.nodes().cpu));
            path_.push_back(static_cast<char>(p.nodes().mem));
            path_.push_back(static_cast<char>(p.nodes().sto));
        }
        if (!prunable(state_.bound(i + 1, true), i + 1)) expand(i + 1);
        state_.undo(i, p);
    }

    // Two prefixes reaching the same state up to node relabelling have the
    // same completions at the same costs. Once one subtree is finished, the
    // other can only add ties, and those lose the lexicographic tie-break
    // when the finished prefix is the smaller one.
    void expand(int depth) {
        if (table_limit_ == 0 || depth == napps_) {
            descend(depth);
            return;
        }
        key_.clear();
        state_.encode(depth, key_);
        const auto it = seen_.find(key_);
        const bool known = it != seen_.end();
        if (known && it->second < path_) return;
        std::string key = key_;
        descend(depth);
        if (aborted_) return;
        path_.resize(static_cast<std::size_t>(depth) * 3);
        if (known) {
            seen_[key] = path_;
        } else if (seen_.size() < table_limit_) {
            seen_.emplace(std::move(key), path_);
        }
    }

    // A subtree survives if it may hold a strictly better objective, or a tie
    // whose decision vector is lexicographically smaller than the incumbent.
    bool prunable(double bound, int depth) const {
        if (bound > best_cost_ + kObjectiveTolerance) return true;
        if (bound < best_cost_ - kObjectiveTolerance) return false;
        for (int k = 0; k < depth; ++k) {
            const auto idx = static_cast<std::size_t>(k);
            if (current_[idx] < best_[idx]) return false;
            if (best_[idx] < current_[idx]) return true;
        }
        return false;
    }

    detail::SearchState state_;
    int napps_;
    int nnodes_;
    Decisions current_;
    Decisions best_;
    double best_cost_ = kInf;
    std::uint64_t node_limit_;
    std::uint64_t nodes_ = 0;
    bool aborted_ = false;
    std::size_t table_limit_;
    std::unordered_map<std::string, std::string> seen_;
    std::string key_;
    std::string path_;
};

} // namespace

Solution solve_exact(const Instance& instance, double budget_seconds) {
    ExactOptions options;
    options.budget_seconds = budget_seconds;
    return solve_exact(instance, options);
}

Solution solve_exact(const Instance& instance, const ExactOptions& options, ExactStats* stats) {
    if (!(options.budget_seconds > 0.0)) throw InvalidArgument("budget must be positive");
    const double allowance = std::max(1.0, options.budget_seconds * options.nodes_per_second);
    const auto limit = allowance >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max()
                                           : static_cast<std::uint64_t>(allowance);

    std::vector<Decisions> seeds{Decisions(instance.apps.size(), Placement::rejected())};
    std::uint64_t spent = 0;
    if (options.warm_start) {
        seeds.push_back(solve_greedy(instance).decisions);
        // Any placement that fits a narrower pool at the same rate also fits
        // this one, and narrow pools are searched much faster.
        const WavelengthPlan& plan = instance.rack.plan;
        for (int w = 2; w < plan.num_channels; w += 2) {
            Instance narrow{with_plan(instance.rack, w, plan.channel_rate_gbps), instance.apps, instance.weights};
            BranchAndBound probe(narrow, (limit - spent) / 8, options.table_entries);
            for (const Decisions& d : seeds) probe.seed(d);
            probe.run();
            spent += probe.nodes();
            seeds.push_back(probe.best());
            if (!probe.completed()) break;
        }
    }

    BranchAndBound search(instance, limit - spent, options.table_entries);
    for (const Decisions& d : seeds) search.seed(d);
    search.run();

    Solution sol = realize(instance, search.best());
    sol.optimal = search.completed();
    if (stats) *stats = {spent + search.nodes(), search.completed()};
    return sol;
}

Solution solve_greedy(const Instance& instance) {
    const RackTopology& rack = instance.rack;
    const auto napps = instance.apps.size();
    const int n = rack.num_nodes();
    detail::SearchState state(instance);
    Decisions decisions(napps, Placement::rejected());

    std::vector<int> order(napps);
    for (std::size_t i = 0; i < napps; ++i) order[i] = static_cast<int>(i);
    const Node& ref = rack.nodes.front();
    auto size_of = [&](int i) {
        const Application& a = instance.apps[static_cast<std::size_t>(i)];
        return a.cpu_ghz / ref.component(ResourceKind::cpu).capacity +
               a.mem_gb / ref.component(ResourceKind::mem).capacity +
               a.sto_gb / ref.component(ResourceKind::sto).capacity;
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return size_of(a) > size_of(b); });

    std::vector<int> leftovers;
    for (int i : order) {
        bool placed = false;
        for (int node = 0; node < n && !placed; ++node) {
            const Placement p = Placement::colocated(node);
            if (state.try_apply(i, p)) {
                decisions[static_cast<std::size_t>(i)] = p;
                placed = true;
            }
        }
        if (!placed) leftovers.push_back(i);
    }

    std::stable_sort(leftovers.begin(), leftovers.end(), [&](int a, int b) {
        return instance.apps[static_cast<std::size_t>(a)].total_flow_gbps() <
               instance.apps[static_cast<std::size_t>(b)].total_flow_gbps();
    });
    const std::vector<Placement> options = placement_options(n);
    for (int i : leftovers) {
        double best_cost = kInf;
        Placement best = Placement::rejected();
        for (const Placement& p : options) {
            if (!p.is_split() || !state.try_apply(i, p)) continue;
            const double c = state.cost();
            state.undo(i, p);
            if (c < best_cost - kObjectiveTolerance) {
                best_cost = c;
                best = p;
            }
        }
        if (best.is_placed()) state.try_apply(i, best);
        decisions[static_cast<std::size_t>(i)] = best;
    }
    return realize(instance, decisions);
}

} // namespace composable
