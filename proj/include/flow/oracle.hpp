#pragma once

#include "flow/interface.hpp"

namespace flow::oracle {

/// Bounds on the candidate value space for exhaustive flow enumeration.
/// Nat and vector components range over 0..value_bound; multiset candidates
/// draw elements up to max_elem (priorities, finite costs) or sets of at
/// most max_set_size nodes, with counts up to max_count.
struct EnumBounds {
    Nat value_bound = 4;
    Nat max_elem = 3;
    Nat max_count = 2;
    Nat max_set_size = 2;
    std::uint64_t state_cap = 1u << 22; // partial assignments explored
};

/// Every total flow assignment within the bounds that satisfies the flow
/// equation for the given inflow. Backtracking over nodes in breadth-first
/// order from the inflow sources, rejecting a node's value as soon as all
/// of its predecessors are fixed. ResourceError past state_cap.
std::vector<FlowAssignment> enumerate_flows(const Graph& g, const FlowAssignment& inflow,
                                            const EnumBounds& bounds = {});

/// Effective acyclicity by definition: feed every closed walk of up to
/// max_len edges the start node's flow and demand zero. Returns the first
/// violating walk, or empty if none. Exponential; meant for tiny graphs.
std::optional<std::vector<NodeId>> brute_cycle_check(const FlowGraph& h, int max_len);

/// Smallest region (by size, then lexicographically) outside of which the
/// two flow graphs agree exactly and whose restrictions share an interface.
/// Exhaustive over subsets; requires equal node sets.
std::set<NodeId> minimal_footprint_search(const FlowGraph& h, const FlowGraph& h2);

/// Interface of the composite computed from the composed graphs themselves,
/// bypassing the interface-level sum entirely.
std::optional<Interface> interface_compose_oracle(const FlowGraph& h1, const FlowGraph& h2);

} // namespace flow::oracle
