#pragma once

#include "flow/edge.hpp"

#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

namespace flow {

/// A node-labelled sparse graph over a flow domain. Edge sources are always
/// members of `nodes`; targets may be outside (dangling edges carry outflow).
/// Zero edge functions are not stored: absent means zero.
struct Graph {
    Domain domain;
    std::set<NodeId> nodes;
    std::map<std::pair<NodeId, NodeId>, EdgeFunction> edges;

    void add_node(const NodeId& n) { nodes.insert(n); }

    /// Set e(from,to); inserting Zero erases. `from` must be a node.
    void set_edge(const NodeId& from, const NodeId& to, const EdgeFunction& e);

    /// e(from,to), defaulting to Zero.
    const EdgeFunction& edge(const NodeId& from, const NodeId& to) const;

    /// Nonzero out-edges of n (target, function).
    std::vector<std::pair<NodeId, const EdgeFunction*>> out_edges(const NodeId& n) const;

    friend bool operator==(const Graph&, const Graph&) = default;
};

using FlowAssignment = std::map<NodeId, Value>;

/// Per-node flow-equation residual: flow(n) should equal
/// inflow(n) + Σ_{n' ∈ nodes} flow(n') ▷ e(n',n).
struct NodeResidual {
    NodeId node;
    Value expected; // right-hand side
    Value actual;   // recorded flow
};

struct FlowEqnReport {
    bool holds = true;
    std::vector<NodeResidual> mismatches;
};

/// Check the flow equation pointwise. `inflow` and `flow` must be total on
/// the node set (missing entries are an input error).
FlowEqnReport check_flow_eqn(const Graph& g, const FlowAssignment& inflow,
                             const FlowAssignment& flow);

/// A graph whose flow satisfies the flow equation for some inflow. The
/// inflow is stored too; it is uniquely determined by the flow
/// (cancellativity), which `validate_flow_graph` exploits to reconstruct it.
struct FlowGraph {
    Graph graph;
    FlowAssignment flow;   // total on graph.nodes
    FlowAssignment inflow; // total on graph.nodes

    friend bool operator==(const FlowGraph&, const FlowGraph&) = default;
};

/// Witness that no inflow exists: at `node` the in-graph contributions
/// exceed the recorded flow (the required inflow would be negative).
struct NoInflow {
    NodeId node;
};

using ValidateResult = std::variant<FlowGraph, NoInflow>;

/// Try to exhibit the unique inflow making (g, flow) a flow graph.
ValidateResult validate_flow_graph(const Graph& g, const FlowAssignment& flow);

/// Contribution of h to each node outside its node set:
/// outf(n') = Σ_{n ∈ nodes} flow(n) ▷ e(n,n'). Zero entries omitted.
FlowAssignment compute_outflow(const FlowGraph& h);

enum class SolveStrategy { Auto, Topo, Capacity, Kleene, Oracle };

struct SolveLimits {
    std::optional<int> max_iters;      // kleene bound override
    Nat oracle_value_bound = 4;        // per-node candidate ceiling (oracle)
    std::uint64_t oracle_state_cap = 1u << 22; // backtracking visit cap
};

enum class SolveOutcome { Solved, NoSolution, NotConverged, MultipleSolutions };

struct SolveResult {
    SolveOutcome outcome = SolveOutcome::NoSolution;
    std::optional<FlowAssignment> flow; // Solved only
    int iterations = 0;                 // kleene/capacity effort
    std::string detail;
};

/// Solve the flow equation for the given inflow.
///   topo      propagate along a topological order (nonzero-edge DAG only)
///   capacity  path-closure formula for endomorphic ScaleVec domains,
///             verified by check_flow_eqn and an effective-acyclicity check
///   kleene    fixpoint iteration from the inflow
///   oracle    bounded exhaustive search (tiny graphs; may report
///             MultipleSolutions)
///   auto      topo if acyclic, else capacity if available, else kleene
SolveResult solve_flow(const Graph& g, const FlowAssignment& inflow,
                       SolveStrategy strategy = SolveStrategy::Auto,
                       const SolveLimits& limits = {});

/// Disjoint union; nullopt when node sets overlap or the union admits no
/// inflow (the pieces disagree about cross flows).
std::optional<FlowGraph> compose_flow_graphs(const FlowGraph& h1, const FlowGraph& h2);

/// Restriction of h to X ⊆ nodes: keeps X's out-edges (targets may dangle)
/// and X's flows. Always a flow graph, and it re-composes with the
/// restriction to the complement.
FlowGraph restrict_flow_graph(const FlowGraph& h, const std::set<NodeId>& x);

/// Singleton restriction.
FlowGraph singleton_flow_graph(const FlowGraph& h, const NodeId& n);

/// True when the nonzero-edge subgraph induced by `nodes` is acyclic.
bool nonzero_edge_acyclic(const Graph& g);

std::string solve_outcome_name(SolveOutcome o);

} // namespace flow
