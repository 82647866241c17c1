#pragma once

#include "flow/generate.hpp"
#include "flow/oracle.hpp"

namespace flow::testgen {

/// Random valid flow graph: solve a random instance, retry until one works.
inline FlowGraph solved_flow_graph(const Domain& d, Rng& rng, const RandomGraphSpec& spec,
                                   const ValueGenBounds& b = {}) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        RandomGraph rg = random_graph(d, rng, spec, b);
        SolveResult s = solve_flow(rg.graph, rg.inflow,
                                   spec.acyclic ? SolveStrategy::Topo : SolveStrategy::Auto);
        if (s.outcome != SolveOutcome::Solved) continue;
        return FlowGraph{rg.graph, *s.flow, rg.inflow};
    }
    throw ResourceError("solved_flow_graph: no solvable instance after 64 attempts");
}

/// Extend a region with one fresh sink node: it receives from a random
/// region node (identity edge) and sends nothing, so the region's inflow
/// and external outflow are untouched. The empty region gains an isolated
/// zero-flow node.
inline FlowGraph with_fresh_sink(const FlowGraph& region, const NodeId& fresh) {
    FlowGraph out = region;
    out.graph.add_node(fresh);
    Value vf = out.graph.domain.zero();
    if (!region.graph.nodes.empty()) {
        const NodeId& src = *region.graph.nodes.begin();
        out.graph.set_edge(src, fresh, EdgeFunction::identity());
        vf = region.flow.at(src);
    }
    out.flow[fresh] = std::move(vf);
    out.inflow[fresh] = out.graph.domain.zero();
    return out;
}

/// Random internal-edge mutation of a closed graph: rewire, retarget, or
/// drop one edge. The mutated graph keeps the same node set, so re-solving
/// with the same inflow gives an equal-interface before/after pair.
inline Graph mutate_edges(const Graph& g, Rng& rng, const ValueGenBounds& b) {
    Graph out = g;
    std::vector<NodeId> nodes(g.nodes.begin(), g.nodes.end());
    for (int attempt = 0; attempt < 32; ++attempt) {
        const NodeId& a = nodes[rng.below(nodes.size())];
        const NodeId& z = nodes[rng.below(nodes.size())];
        if (a == z) continue;
        if (!out.edge(a, z).is_zero() && rng.chance(1, 2)) {
            out.set_edge(a, z, EdgeFunction::zero());
            return out;
        }
        out.set_edge(a, z, random_edge(g.domain, rng, b));
        return out;
    }
    return out;
}

/// Mirrors the oracle's bound acceptance so tests can tell "no solution in
/// bounds" apart from a genuine miss.
inline bool fits_enum_bounds(const Value& v, const oracle::EnumBounds& b) {
    switch (v.kind) {
    case ValueKind::Nat:
        return v.nat <= b.value_bound;
    case ValueKind::NatVec:
        for (Nat c : v.vec)
            if (c > b.value_bound) return false;
        return true;
    case ValueKind::MultisetNat:
        for (const auto& [e, c] : v.ms_nat)
            if (e > b.max_elem || c > b.max_count) return false;
        return true;
    case ValueKind::MultisetCost:
        for (const auto& [e, c] : v.ms_cost)
            if ((!e.inf && e.finite > b.max_elem) || c > b.max_count) return false;
        return true;
    case ValueKind::MultisetNodeSet:
        for (const auto& [s, c] : v.ms_sets)
            if (s.size() > b.max_set_size || c > b.max_count) return false;
        return true;
    }
    return false;
}

inline bool fits_enum_bounds(const FlowAssignment& a, const oracle::EnumBounds& b) {
    for (const auto& [n, v] : a)
        if (!fits_enum_bounds(v, b)) return false;
    return true;
}

} // namespace flow::testgen
