#pragma once

#include "flow/interface.hpp"

#include <variant>

namespace flow {

/// Symbolic path closure of a ScaleVec graph: cap(n,n') sums the edge
/// coefficient products over all walks from n to n' of length <= depth, plus
/// the identity at n itself. Depth is the node count, enough for a simple
/// path through every node plus one escape edge. Rows exist for every node;
/// columns cover nodes and edge targets (anything else is the implicit
/// delta column).
struct Capacity {
    int depth = 0;
    size_t arity = 1;
    std::map<NodeId, std::map<NodeId, std::vector<Nat>>> rows;

    /// Coefficients of cap(src,tgt); delta when untracked.
    std::vector<Nat> at(const NodeId& src, const NodeId& tgt) const;
};

/// Path closure of the whole graph. Requires an endomorphic ScaleVec domain
/// (path_count or a product).
Capacity capacity(const Graph& g);

struct EaResult {
    bool ea = true;
    std::vector<NodeId> witness_cycle; // first violating cycle, rotated to the start node
};

/// Effective acyclicity: every cyclic composition, fed the start node's
/// flow, vanishes. For positive monoids with endomorphic edges this reduces
/// to checking each simple cycle of the nonzero-edge graph at every
/// rotation. Non-endomorphic domains raise CapabilityError.
EaResult check_effectively_acyclic(const FlowGraph& h);

/// i1 extends to i2 keeping the context oblivious: i2 covers i1's nodes,
/// agrees with its inflows there, and sends the same outflow everywhere
/// outside i1's nodes (compared on the union of supports; entries absent on
/// one side count as zero).
bool contextual_extension(const Interface& i1, const Interface& i2);

enum class SubflowMode { Auto, Symbolic, Enumerate };

struct SubflowLimits {
    std::uint64_t downset_cap = 4096; // enumerated inflow-downset candidates
};

/// Subflow-preserving extension: contextual extension of the interfaces,
/// plus capacity agreement out of the region for every value below the
/// inflow (old nodes), and zero escape for the new nodes. Symbolic mode
/// compares ScaleVec coefficients on the inflow's positive components;
/// enumerate mode walks the inflow downsets (downset_enumerable domains).
bool subflow_preserving_extension(const FlowGraph& h, const FlowGraph& h2,
                                  SubflowMode mode = SubflowMode::Auto,
                                  const SubflowLimits& limits = {});

/// Pointwise footprint of an interface-preserving rewrite: the nodes whose
/// singleton flow subgraph differs (flow value or outgoing edge row).
/// Requires equal node sets and equal interfaces.
std::set<NodeId> footprint(const FlowGraph& h, const FlowGraph& h2);

enum class ReplaceMode { Equal, Contextual, Subflow };

enum class ReplaceErrorCode {
    RegionInterfaceMismatch, // Equal: replacement interface differs
    NotContextual,           // Contextual: extension check failed
    FreshNodeContextInflow,  // context sends flow into a new node
    NotSubflowPreserving,    // Subflow: capacity conditions failed
    InputNotEa,              // Subflow: whole input graph must be EA
    ComposeUndefined         // pieces refused to recompose
};

struct ReplaceError {
    ReplaceErrorCode code;
    std::string message;
};

struct ReplaceReport {
    FlowGraph result;
    bool interface_equal = false;    // replacement kept the region interface
    bool interface_extended = false; // replacement contextually extends it
    std::optional<bool> result_ea;   // checked for Subflow mode
};

using ReplaceResult = std::variant<ReplaceReport, ReplaceError>;

/// Cut region x1 out of h and splice h1new in its place, guarded by the
/// mode's side conditions.
ReplaceResult replace_region(const FlowGraph& h, const std::set<NodeId>& x1,
                             const FlowGraph& h1new, ReplaceMode mode,
                             const SubflowLimits& limits = {});

std::string replace_error_name(ReplaceErrorCode c);

} // namespace flow
