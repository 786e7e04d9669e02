#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "composable/placement.hpp"
#include "composable/solver.hpp"

namespace composable::detail {

/// alpha2 * minimal dynamic compute power + alpha1 * one on-board traversal
/// of both flows: a placement-independent floor on serving `app`.
double optimistic_app_cost(const RackTopology& rack, const Application& app,
                           const ObjectiveWeights& w);

/// Incremental placement state shared by the branch-and-bound and the greedy
/// heuristic. All tallies are integers (milli kind units, Gb/s) so that
/// apply/undo round-trips exactly.
class SearchState {
public:
    explicit SearchState(const Instance& instance);

    int num_nodes() const noexcept { return n_; }
    int num_apps() const noexcept { return static_cast<int>(apps_.size()); }

    bool fits(int app, int node, std::size_t kind) const noexcept {
        return load(node, kind) + apps_[static_cast<std::size_t>(app)].milli[kind] <=
               cap_[static_cast<std::size_t>(node) * 3 + kind];
    }

    /// Applies `p` for app `app` if capacities and the channel pool allow it.
    bool try_apply(int app, const Placement& p);
    void undo(int app, const Placement& p);

    /// Objective of everything applied so far (unapplied apps contribute nothing).
    double cost() const;

    /// Prefix cost plus an optimistic completion cost of apps
    /// [first_undecided, n). `with_activation` adds the idle power of the
    /// components the remaining demand must switch on and, when rejections
    /// dominate the objective, the rejections forced by per-kind packing.
    double bound(int first_undecided, bool with_activation) const;

    /// A fresh node of a class may only be opened in ascending id order.
    bool canonical(const Placement& p) const noexcept;

    /// Whether `node` may be used next given that `opened_a` and `opened_b`
    /// (or -1) were already opened by the same placement.
    bool may_open(int node, int opened_a, int opened_b) const noexcept;

    bool referenced(int node) const noexcept { return uses_[static_cast<std::size_t>(node)] > 0; }

    /// Fewest of apps [first_undecided, n) that cannot be placed, judged one
    /// resource kind at a time.
    int forced_rejections(int first_undecided) const;

    /// Appends an encoding of the state that is equal for two states exactly
    /// when a class-preserving node relabelling maps one onto the other
    /// (up to ties in the relabelling, which only cause misses).
    void encode(int depth, std::string& out) const;

private:
    struct AppDemand {
        std::array<std::int64_t, 3> milli{};
        int cm = 0;
        int cd = 0;
    };

    std::int64_t& load(int node, std::size_t kind) noexcept {
        return load_[static_cast<std::size_t>(node) * 3 + kind];
    }
    std::int64_t load(int node, std::size_t kind) const noexcept {
        return load_[static_cast<std::size_t>(node) * 3 + kind];
    }
    int pair_channels(std::int64_t gbps) const;
    void add_flow(int src, int dst, int gbps, int sign);
    int max_placeable(std::size_t kind, const std::vector<std::int64_t>& ascending) const;
    double activation(std::size_t j, int dropped) const;

    const Instance& inst_;
    int n_ = 0;
    int max_channels_ = 0;
    double rate_ = 0.0;
    bool rejection_dominant_ = false;
    std::vector<AppDemand> apps_;
    std::vector<std::int64_t> cap_;   // [node*3 + kind]
    std::vector<double> idle_w_;      // [node*3 + kind]
    std::vector<double> dyn_w_;       // [node*3 + kind]
    std::vector<int> node_class_;
    std::vector<std::vector<int>> class_members_;

    // Suffix data over apps for the bounds.
    std::vector<std::array<std::int64_t, 3>> rem_milli_;
    std::vector<double> rem_place_cost_;   // sum of c_j
    std::vector<double> rem_min_cost_;     // sum of min(alpha3, c_j)
    std::vector<double> rem_reject_gap_;   // min_j max(0, alpha3 - c_j)
    std::vector<std::array<std::vector<std::int64_t>, 3>> rem_sizes_; // ascending
    std::vector<std::vector<double>> rem_costs_;                       // descending

    std::int64_t int_rate_ = 0; ///< channel rate when it is a whole number of Gb/s
    std::vector<std::int64_t> load_;
    std::vector<int> uses_;        ///< hosted resources per node
    mutable std::vector<std::int64_t> scratch_free_;
    mutable std::vector<std::int64_t> scratch_items_;
    mutable std::vector<std::int64_t> scratch_ffd_;
    std::vector<std::int64_t> pair_gbps_; // [src*n + dst]
    int channels_ = 0;
    std::int64_t nch_gbps_ = 0;
    std::int64_t onboard_gbps_ = 0;
    int rejected_ = 0;
};

} // namespace composable::detail
