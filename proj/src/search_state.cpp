#include "search_state.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <tuple>
#include <limits>

#include "composable/rwa.hpp"
#include "units.hpp"

namespace composable::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

double optimistic_app_cost(const RackTopology& rack, const Application& app,
                           const ObjectiveWeights& w) {
    const std::array<double, 3> demand{app.cpu_ghz, app.mem_gb, app.sto_gb};
    double dyn = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        double per_unit = kInf;
        for (const Node& node : rack.nodes) {
            const auto& c = node.components[k];
            per_unit = std::min(per_unit, c.dynamic_range * c.peak_power_w / c.capacity);
        }
        dyn += per_unit * demand[k];
    }
    const double onboard = rack.onboard_epb_j_per_bit * app.total_flow_gbps() * 1e9;
    return w.alpha2 * dyn + w.alpha1 * onboard;
}

SearchState::SearchState(const Instance& instance)
    : inst_(instance),
      n_(instance.rack.num_nodes()),
      max_channels_(instance.rack.plan.num_channels),
      rate_(instance.rack.plan.channel_rate_gbps) {
    const auto nn = static_cast<std::size_t>(n_);
    cap_.resize(nn * 3);
    idle_w_.resize(nn * 3);
    dyn_w_.resize(nn * 3);
    for (std::size_t node = 0; node < nn; ++node)
        for (std::size_t k = 0; k < 3; ++k) {
            const auto& c = instance.rack.nodes[node].components[k];
            cap_[node * 3 + k] = to_milli(c.capacity);
            idle_w_[node * 3 + k] = c.idle_power_w();
            dyn_w_[node * 3 + k] = c.dynamic_range * c.peak_power_w;
        }
    node_class_ = interchangeable_classes(instance.rack);
    for (int node = 0; node < n_; ++node) {
        const auto cls = static_cast<std::size_t>(node_class_[static_cast<std::size_t>(node)]);
        if (class_members_.size() <= cls) class_members_.resize(cls + 1);
        class_members_[cls].push_back(node);
    }

    const auto& w = instance.weights;
    const std::size_t napps = instance.apps.size();
    apps_.reserve(napps);
    for (const Application& a : instance.apps)
        apps_.push_back({{to_milli(a.cpu_ghz), to_milli(a.mem_gb), to_milli(a.sto_gb)}, a.cm_gbps, a.cd_gbps});

    rem_milli_.assign(napps + 1, {0, 0, 0});
    rem_place_cost_.assign(napps + 1, 0.0);
    rem_min_cost_.assign(napps + 1, 0.0);
    rem_reject_gap_.assign(napps + 1, kInf);
    double max_cost = 0.0;
    for (std::size_t j = napps; j-- > 0;) {
        const double c = optimistic_app_cost(instance.rack, instance.apps[j], w);
        for (std::size_t k = 0; k < 3; ++k) rem_milli_[j][k] = rem_milli_[j + 1][k] + apps_[j].milli[k];
        rem_place_cost_[j] = rem_place_cost_[j + 1] + c;
        rem_min_cost_[j] = rem_min_cost_[j + 1] + std::min(w.alpha3, c);
        rem_reject_gap_[j] = std::min(rem_reject_gap_[j + 1], std::max(0.0, w.alpha3 - c));
        max_cost = std::max(max_cost, c);
    }
    rem_sizes_.resize(napps + 1);
    rem_costs_.resize(napps + 1);
    for (std::size_t j = napps; j-- > 0;) {
        for (std::size_t k = 0; k < 3; ++k) {
            auto& v = rem_sizes_[j][k];
            v = rem_sizes_[j + 1][k];
            v.insert(std::upper_bound(v.begin(), v.end(), apps_[j].milli[k]), apps_[j].milli[k]);
        }
        auto& c = rem_costs_[j];
        c = rem_costs_[j + 1];
        const double cj = optimistic_app_cost(instance.rack, instance.apps[j], w);
        c.insert(std::upper_bound(c.begin(), c.end(), cj, std::greater<>()), cj);
    }
    double all_idle = 0.0;
    for (double v : idle_w_) all_idle += v;
    rejection_dominant_ = w.alpha3 >= max_cost + w.alpha2 * all_idle;

    if (rate_ >= 1.0 && rate_ <= 1e9 && std::floor(rate_) == rate_) int_rate_ = static_cast<std::int64_t>(rate_);
    load_.assign(nn * 3, 0);
    uses_.assign(nn, 0);
    pair_gbps_.assign(nn * nn, 0);
}

int SearchState::pair_channels(std::int64_t gbps) const {
    if (gbps <= 0) return 0;
    if (int_rate_ > 0) return static_cast<int>((gbps + int_rate_ - 1) / int_rate_);
    return channels_required(static_cast<double>(gbps), rate_);
}

void SearchState::add_flow(int src, int dst, int gbps, int sign) {
    auto& pair = pair_gbps_[static_cast<std::size_t>(src * n_ + dst)];
    const std::int64_t before = pair;
    pair += sign * gbps;
    channels_ += pair_channels(pair) - pair_channels(before);
    nch_gbps_ += sign * 2 * static_cast<std::int64_t>(gbps);
    onboard_gbps_ += sign * 2 * static_cast<std::int64_t>(gbps);
}

bool SearchState::try_apply(int app, const Placement& p) {
    if (p.is_rejected()) {
        ++rejected_;
        return true;
    }
    const AppDemand& d = apps_[static_cast<std::size_t>(app)];
    const NodeTriple& t = p.nodes();
    const std::array<int, 3> hosts{t.cpu, t.mem, t.sto};
    for (std::size_t k = 0; k < 3; ++k)
        if (load(hosts[k], k) + d.milli[k] > cap_[static_cast<std::size_t>(hosts[k]) * 3 + k]) return false;

    if (t.mem != t.cpu) add_flow(t.cpu, t.mem, d.cm, +1);
    if (t.sto != t.cpu) add_flow(t.cpu, t.sto, d.cd, +1);
    if (channels_ > max_channels_) {
        if (t.sto != t.cpu) add_flow(t.cpu, t.sto, d.cd, -1);
        if (t.mem != t.cpu) add_flow(t.cpu, t.mem, d.cm, -1);
        return false;
    }
    if (t.mem == t.cpu) onboard_gbps_ += d.cm;
    if (t.sto == t.cpu) onboard_gbps_ += d.cd;
    for (std::size_t k = 0; k < 3; ++k) {
        load(hosts[k], k) += d.milli[k];
        ++uses_[static_cast<std::size_t>(hosts[k])];
    }
    return true;
}

void SearchState::undo(int app, const Placement& p) {
    if (p.is_rejected()) {
        --rejected_;
        return;
    }
    const AppDemand& d = apps_[static_cast<std::size_t>(app)];
    const NodeTriple& t = p.nodes();
    const std::array<int, 3> hosts{t.cpu, t.mem, t.sto};
    for (std::size_t k = 0; k < 3; ++k) {
        load(hosts[k], k) -= d.milli[k];
        --uses_[static_cast<std::size_t>(hosts[k])];
    }
    if (t.sto == t.cpu) onboard_gbps_ -= d.cd;
    if (t.mem == t.cpu) onboard_gbps_ -= d.cm;
    if (t.sto != t.cpu) add_flow(t.cpu, t.sto, d.cd, -1);
    if (t.mem != t.cpu) add_flow(t.cpu, t.mem, d.cm, -1);
}

double SearchState::cost() const {
    const RackTopology& rack = inst_.rack;
    const auto& w = inst_.weights;
    double tcpc = 0.0;
    for (std::size_t i = 0; i < load_.size(); ++i)
        if (load_[i] > 0)
            tcpc += idle_w_[i] + dyn_w_[i] * (static_cast<double>(load_[i]) / static_cast<double>(cap_[i]));
    const double tnpc = rack.nch_epb_j_per_bit * (static_cast<double>(nch_gbps_) * 1e9) +
                        (rack.charge_tor_idle ? rack.tor_idle_w : 0.0) +
                        rack.onboard_epb_j_per_bit * (static_cast<double>(onboard_gbps_) * 1e9);
    return w.alpha1 * tnpc + w.alpha2 * tcpc + w.alpha3 * rejected_ + w.alpha4 * channels_;
}


namespace {

// Exact check that `items` (descending) fit into bins with the given free
// space. Gives up after a fixed number of steps and then reports success,
// which keeps any rejection count derived from it optimistic.
class Packer {
public:
    Packer(std::vector<std::int64_t>& free, const std::vector<std::int64_t>& items,
           std::vector<std::int64_t>& scratch)
        : free_(free), items_(items), scratch_(scratch) {}

    bool fits() {
        if (first_fit()) return true;
        return place(0);
    }

private:
    static constexpr int kStepLimit = 20000;

    bool first_fit() {
        auto& f = scratch_;
        f.assign(free_.begin(), free_.end());
        for (std::int64_t s : items_) {
            auto it = std::find_if(f.begin(), f.end(), [s](std::int64_t b) { return b >= s; });
            if (it == f.end()) return false;
            *it -= s;
        }
        return true;
    }

    bool place(std::size_t idx) {
        if (idx == items_.size()) return true;
        if (++steps_ > kStepLimit) return true;
        const std::int64_t s = items_[idx];
        for (std::size_t b = 0; b < free_.size(); ++b) {
            if (free_[b] < s) continue;
            bool seen = false;
            for (std::size_t e = 0; e < b && !seen; ++e) seen = free_[e] == free_[b];
            if (seen) continue;
            free_[b] -= s;
            const bool ok = place(idx + 1);
            free_[b] += s;
            if (ok) return true;
        }
        return false;
    }

    std::vector<std::int64_t>& free_;
    const std::vector<std::int64_t>& items_;
    std::vector<std::int64_t>& scratch_;
    int steps_ = 0;
};

template <typename T>
void append(std::string& out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
}

} // namespace

// The k items that can be placed may as well be the k smallest, so the
// answer is the largest k whose smallest-k prefix packs.
int SearchState::max_placeable(std::size_t kind, const std::vector<std::int64_t>& ascending) const {
    auto& free = scratch_free_;
    free.clear();
    std::int64_t total = 0;
    std::int64_t widest = 0;
    for (int node = 0; node < n_; ++node) {
        const std::int64_t f = cap_[static_cast<std::size_t>(node) * 3 + kind] - load(node, kind);
        if (f <= 0) continue;
        free.push_back(f);
        total += f;
        widest = std::max(widest, f);
    }
    std::size_t k = 0;
    std::int64_t sum = 0;
    while (k < ascending.size() && ascending[k] <= widest && sum + ascending[k] <= total) sum += ascending[k++];
    std::sort(free.begin(), free.end(), std::greater<>());
    auto& items = scratch_items_;
    for (; k > 0; --k) {
        items.assign(ascending.rbegin() + static_cast<std::ptrdiff_t>(ascending.size() - k), ascending.rend());
        if (Packer(free, items, scratch_ffd_).fits()) break;
    }
    return static_cast<int>(k);
}

int SearchState::forced_rejections(int first_undecided) const {
    const auto j = static_cast<std::size_t>(first_undecided);
    if (j >= apps_.size()) return 0;
    const int remaining = static_cast<int>(apps_.size() - j);
    int forced = 0;
    for (std::size_t k = 0; k < 3; ++k)
        forced = std::max(forced, remaining - max_placeable(k, rem_sizes_[j][k]));
    return forced;
}

// Idle power of the components that must be switched on to host the
// remaining demand once the `dropped` largest items of each kind are left out.
double SearchState::activation(std::size_t j, int dropped) const {
    double total = 0.0;
    auto& spare = scratch_free_;
    for (std::size_t k = 0; k < 3; ++k) {
        const auto& sizes = rem_sizes_[j][k];
        std::int64_t deficit = rem_milli_[j][k];
        for (int d = 0; d < dropped && d < static_cast<int>(sizes.size()); ++d)
            deficit -= sizes[sizes.size() - 1 - static_cast<std::size_t>(d)];
        spare.clear();
        double cheapest_idle = kInf;
        for (std::size_t node = 0; node < static_cast<std::size_t>(n_); ++node) {
            const std::size_t i = node * 3 + k;
            if (load_[i] > 0) {
                deficit -= cap_[i] - load_[i];
            } else {
                spare.push_back(cap_[i]);
                cheapest_idle = std::min(cheapest_idle, idle_w_[i]);
            }
        }
        if (deficit <= 0) continue;
        std::sort(spare.begin(), spare.end(), std::greater<>());
        int opened = 0;
        for (std::int64_t c : spare) {
            if (deficit <= 0) break;
            deficit -= c;
            ++opened;
        }
        if (deficit > 0) return kInf;
        total += opened * cheapest_idle;
    }
    return total;
}

double SearchState::bound(int first_undecided, bool with_activation) const {
    const double base = cost();
    const auto j = static_cast<std::size_t>(first_undecided);
    if (j >= apps_.size()) return base;
    if (!with_activation) return base + rem_min_cost_[j];
    const auto& w = inst_.weights;

    // With alpha3 above any placed app's possible contribution, every extra
    // rejection costs more than it can save, so the forced count is a floor.
    if (rejection_dominant_) {
        const int forced = forced_rejections(first_undecided);
        if (forced > 0) {
            double kept = rem_place_cost_[j];
            for (int d = 0; d < forced; ++d) kept -= rem_costs_[j][static_cast<std::size_t>(d)];
            const double act = activation(j, forced);
            return base + forced * w.alpha3 + kept + (act == kInf ? 0.0 : w.alpha2 * act);
        }
    }

    const double act = activation(j, 0);
    const double place_all = act == kInf ? kInf : rem_place_cost_[j] + w.alpha2 * act;
    const double reject_some = rem_min_cost_[j] + rem_reject_gap_[j];
    return base + std::min(place_all, reject_some);
}

bool SearchState::may_open(int node, int opened_a, int opened_b) const noexcept {
    if (node == opened_a || node == opened_b || referenced(node)) return true;
    for (int m : class_members_[static_cast<std::size_t>(node_class_[static_cast<std::size_t>(node)])]) {
        if (m == opened_a || m == opened_b || referenced(m)) continue;
        return m == node;
    }
    return false;
}

bool SearchState::canonical(const Placement& p) const noexcept {
    if (p.is_rejected()) return true;
    const NodeTriple& t = p.nodes();
    return may_open(t.cpu, -1, -1) && may_open(t.mem, t.cpu, -1) && may_open(t.sto, t.cpu, t.mem);
}

void SearchState::encode(int depth, std::string& out) const {
    std::array<int, 256> order{};
    std::array<int, 256> pos{};
    const auto nn = static_cast<std::size_t>(n_);
    for (std::size_t i = 0; i < nn; ++i) order[i] = static_cast<int>(i);
    auto key = [&](int v) {
        const auto b = static_cast<std::size_t>(v) * 3;
        return std::tuple(node_class_[static_cast<std::size_t>(v)], load_[b], load_[b + 1], load_[b + 2], v);
    };
    std::sort(order.begin(), order.begin() + n_, [&](int a, int b) { return key(a) < key(b); });
    for (std::size_t i = 0; i < nn; ++i) pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);

    append(out, static_cast<std::int16_t>(depth));
    append(out, static_cast<std::int16_t>(rejected_));
    append(out, onboard_gbps_);
    for (std::size_t i = 0; i < nn; ++i) {
        const auto b = static_cast<std::size_t>(order[i]) * 3;
        append(out, static_cast<std::int16_t>(node_class_[static_cast<std::size_t>(order[i])]));
        for (std::size_t k = 0; k < 3; ++k) append(out, static_cast<std::int32_t>(load_[b + k]));
    }
    std::array<std::uint64_t, 64> pairs{};
    std::size_t count = 0;
    for (std::size_t s = 0; s < nn; ++s)
        for (std::size_t d = 0; d < nn; ++d) {
            const std::int64_t g = pair_gbps_[s * nn + d];
            if (g == 0) continue;
            if (count == pairs.size()) {
                // Too many pairs for the compact form: fall back to raw ids
                // and the relabelling, which is exact but rarely matches.
                append(out, static_cast<std::int16_t>(-1));
                for (std::size_t i = 0; i < nn; ++i) append(out, static_cast<std::int16_t>(order[i]));
                for (std::size_t q = 0; q < nn * nn; ++q) append(out, static_cast<std::int32_t>(pair_gbps_[q]));
                return;
            }
            pairs[count++] = (static_cast<std::uint64_t>(pos[s]) << 40) |
                             (static_cast<std::uint64_t>(pos[d]) << 32) | static_cast<std::uint64_t>(g);
        }
    std::sort(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(count));
    append(out, static_cast<std::int16_t>(count));
    for (std::size_t q = 0; q < count; ++q) append(out, pairs[q]);
}

} // namespace composable::detail
