#pragma once

#include <compare>
#include <vector>

namespace composable {

/// Hosting nodes for one application's CPU, memory and storage demand.
struct NodeTriple {
    int cpu = 0;
    int mem = 0;
    int sto = 0;

    bool colocated() const noexcept { return cpu == mem && mem == sto; }
    friend auto operator<=>(const NodeTriple&, const NodeTriple&) = default;
};

/// Either Rejected or a node triple. Ordering places every triple before
/// Rejected and compares triples lexicographically.
class Placement {
public:
    Placement() = default;
    static Placement rejected() noexcept { return Placement{}; }
    static Placement on(int cpu, int mem, int sto) noexcept { return Placement{NodeTriple{cpu, mem, sto}}; }
    static Placement colocated(int node) noexcept { return on(node, node, node); }

    bool is_rejected() const noexcept { return rejected_; }
    bool is_placed() const noexcept { return !rejected_; }
    /// Only meaningful when placed.
    const NodeTriple& nodes() const noexcept { return nodes_; }
    bool is_split() const noexcept { return !rejected_ && !nodes_.colocated(); }

    friend bool operator==(const Placement& a, const Placement& b) noexcept {
        return a.rejected_ == b.rejected_ && (a.rejected_ || a.nodes_ == b.nodes_);
    }
    friend std::strong_ordering operator<=>(const Placement& a, const Placement& b) noexcept {
        if (a.rejected_ || b.rejected_) return a.rejected_ <=> b.rejected_;
        return a.nodes_ <=> b.nodes_;
    }

private:
    explicit Placement(NodeTriple nodes) noexcept : nodes_(nodes), rejected_(false) {}

    NodeTriple nodes_{};
    bool rejected_ = true;
};

using Decisions = std::vector<Placement>;

} // namespace composable
