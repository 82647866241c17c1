#pragma once

#include "flow/graph.hpp"

#include <vector>

namespace flow {

/// Size knobs for random value generation.
struct ValueGenBounds {
    Nat max_nat = 4;        // scalar / tuple component ceiling
    Nat max_elem = 3;       // largest multiset element (priority or cost)
    Nat max_count = 2;      // per-element multiplicity ceiling
    int max_entries = 3;    // distinct multiset entries
    int max_set_size = 2;   // node-set size for inverse_reach
    std::vector<NodeId> universe; // node ids for inverse_reach sets
};

Value random_value(const Domain& d, Rng& rng, const ValueGenBounds& b);

/// Random edge function admitted by d (never Zero; absent edges encode zero).
EdgeFunction random_edge(const Domain& d, Rng& rng, const ValueGenBounds& b);

struct RandomGraphSpec {
    int min_nodes = 2;
    int max_nodes = 8;
    bool acyclic = true;    // restrict edges to increasing node order
    int extra_edges = 3;    // edges beyond a sparse backbone
    int inflow_entries = 2; // nodes given nonzero inflow
};

/// Random graph plus inflow over d. With `acyclic` the nonzero-edge graph is
/// a DAG by construction, so a flow always exists and is unique.
struct RandomGraph {
    std::vector<NodeId> order; // node creation order (a topological order if acyclic)
    Graph graph;
    FlowAssignment inflow;
};

RandomGraph random_graph(const Domain& d, Rng& rng, const RandomGraphSpec& spec,
                         const ValueGenBounds& b);

/// Random valid effectively-acyclic flow graph over an endomorphic domain:
/// a solved random DAG, or (for products, sometimes) two overlaid edge-routes
/// whose mixed cycles compose to zero.
FlowGraph random_ea_flow_graph(const Domain& d, Rng& rng, const RandomGraphSpec& spec,
                               const ValueGenBounds& b);

} // namespace flow
