#include "flow/graph.hpp"

#include "flow/extension.hpp"
#include "flow/oracle.hpp"

#include <algorithm>
#include <deque>

namespace flow {

void Graph::set_edge(const NodeId& from, const NodeId& to, const EdgeFunction& e) {
    if (!nodes.count(from))
        throw InputError("set_edge: source " + from + " is not a node");
    if (!edge_admitted(domain, e))
        throw InputError("set_edge: function " + edge_kind_name(e.kind) +
                         " not admitted by domain " + domain.name());
    if (e.is_zero())
        edges.erase({from, to});
    else
        edges[{from, to}] = e;
}

const EdgeFunction& Graph::edge(const NodeId& from, const NodeId& to) const {
    static const EdgeFunction kZero = EdgeFunction::zero();
    auto it = edges.find({from, to});
    return it == edges.end() ? kZero : it->second;
}

std::vector<std::pair<NodeId, const EdgeFunction*>> Graph::out_edges(const NodeId& n) const {
    std::vector<std::pair<NodeId, const EdgeFunction*>> out;
    for (auto it = edges.lower_bound({n, NodeId()});
         it != edges.end() && it->first.first == n; ++it)
        out.emplace_back(it->first.second, &it->second);
    return out;
}

namespace {

const Value& lookup(const FlowAssignment& m, const NodeId& n, const char* what) {
    auto it = m.find(n);
    if (it == m.end()) throw InputError(std::string(what) + " missing for node " + n);
    return it->second;
}

// Right-hand side of the flow equation at every node.
FlowAssignment equation_rhs(const Graph& g, const FlowAssignment& inflow,
                            const FlowAssignment& flow) {
    FlowAssignment rhs;
    for (const auto& n : g.nodes) rhs[n] = lookup(inflow, n, "inflow");
    for (const auto& [key, e] : g.edges) {
        const auto& [from, to] = key;
        if (!g.nodes.count(to)) continue;
        rhs[to] = monoid_add(rhs[to], edge_eval(g.domain, e, lookup(flow, from, "flow")));
    }
    return rhs;
}

} // namespace

FlowEqnReport check_flow_eqn(const Graph& g, const FlowAssignment& inflow,
                             const FlowAssignment& flow) {
    FlowEqnReport report;
    FlowAssignment rhs = equation_rhs(g, inflow, flow);
    for (const auto& n : g.nodes) {
        const Value& actual = lookup(flow, n, "flow");
        if (rhs[n] != actual) {
            report.holds = false;
            report.mismatches.push_back({n, rhs[n], actual});
        }
    }
    return report;
}

ValidateResult validate_flow_graph(const Graph& g, const FlowAssignment& flow) {
    FlowAssignment contrib;
    for (const auto& n : g.nodes) contrib[n] = g.domain.zero();
    for (const auto& [key, e] : g.edges) {
        const auto& [from, to] = key;
        if (!g.nodes.count(to)) continue;
        contrib[to] = monoid_add(contrib[to], edge_eval(g.domain, e, lookup(flow, from, "flow")));
    }
    FlowGraph h;
    h.graph = g;
    for (const auto& n : g.nodes) {
        auto in = monoid_subtract(lookup(flow, n, "flow"), contrib[n]);
        if (!in) return NoInflow{n};
        h.inflow[n] = std::move(*in);
        h.flow[n] = flow.at(n);
    }
    return h;
}

FlowAssignment compute_outflow(const FlowGraph& h) {
    FlowAssignment out;
    for (const auto& [key, e] : h.graph.edges) {
        const auto& [from, to] = key;
        if (h.graph.nodes.count(to)) continue;
        Value v = edge_eval(h.graph.domain, e, h.flow.at(from));
        if (v.is_zero()) continue;
        auto it = out.find(to);
        if (it == out.end())
            out.emplace(to, std::move(v));
        else
            it->second = monoid_add(it->second, v);
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

bool nonzero_edge_acyclic(const Graph& g) {
    std::map<NodeId, int> indeg;
    for (const auto& n : g.nodes) indeg[n] = 0;
    for (const auto& [key, e] : g.edges)
        if (g.nodes.count(key.second)) indeg[key.second]++;
    std::deque<NodeId> ready;
    for (const auto& [n, d] : indeg)
        if (d == 0) ready.push_back(n);
    size_t seen = 0;
    while (!ready.empty()) {
        NodeId n = ready.front();
        ready.pop_front();
        ++seen;
        for (const auto& [t, e] : g.out_edges(n)) {
            if (!g.nodes.count(t)) continue;
            if (--indeg[t] == 0) ready.push_back(t);
        }
    }
    return seen == g.nodes.size();
}

namespace {

std::vector<NodeId> topo_order(const Graph& g) {
    std::map<NodeId, int> indeg;
    for (const auto& n : g.nodes) indeg[n] = 0;
    for (const auto& [key, e] : g.edges)
        if (g.nodes.count(key.second)) indeg[key.second]++;
    std::deque<NodeId> ready;
    for (const auto& [n, d] : indeg)
        if (d == 0) ready.push_back(n);
    std::vector<NodeId> order;
    while (!ready.empty()) {
        NodeId n = ready.front();
        ready.pop_front();
        order.push_back(n);
        for (const auto& [t, e] : g.out_edges(n)) {
            if (!g.nodes.count(t)) continue;
            if (--indeg[t] == 0) ready.push_back(t);
        }
    }
    if (order.size() != g.nodes.size())
        throw InputError("topo: the nonzero-edge graph is cyclic");
    return order;
}

SolveResult solve_topo(const Graph& g, const FlowAssignment& inflow) {
    std::vector<NodeId> order = topo_order(g);
    FlowAssignment flow;
    for (const auto& n : order) {
        Value v = lookup(inflow, n, "inflow");
        // All predecessors precede n in the order, so their flows are final.
        for (const auto& [key, e] : g.edges) {
            if (key.second != n || !g.nodes.count(key.first)) continue;
            v = monoid_add(v, edge_eval(g.domain, e, flow.at(key.first)));
        }
        flow[n] = std::move(v);
    }
    SolveResult r;
    r.outcome = SolveOutcome::Solved;
    r.flow = std::move(flow);
    return r;
}

bool scale_capable(const Domain& d) {
    return d.endomorphic &&
           (d.kind == DomainKind::PathCount || d.kind == DomainKind::Product);
}

// One capacity row: symbolic coefficients of paths from src into each node,
// iterated to the graph-size depth (early exit at a fixpoint is sound here
// because the result is verified independently).
std::map<NodeId, std::vector<Nat>> capacity_row(const Graph& g, const NodeId& src,
                                                int* iterations) {
    size_t k = static_cast<size_t>(g.domain.arity);
    std::vector<Nat> delta(k, 1);
    std::map<NodeId, std::vector<Nat>> row;
    row[src] = delta;
    int depth = static_cast<int>(g.nodes.size());
    for (int i = 0; i < depth; ++i) {
        std::map<NodeId, std::vector<Nat>> next;
        next[src] = delta;
        for (const auto& [key, e] : g.edges) {
            const auto& [from, to] = key;
            auto it = row.find(from);
            if (it == row.end()) continue;
            std::vector<Nat> coeff(k, 0);
            if (e.kind == EdgeKind::Identity)
                coeff.assign(k, 1);
            else if (e.kind == EdgeKind::ScaleVec)
                coeff = e.coeffs;
            else
                throw CapabilityError("capacity: edge " + edge_kind_name(e.kind) +
                                      " has no coefficient form");
            auto& cell = next[to];
            if (cell.empty()) cell.assign(k, 0);
            for (size_t j = 0; j < k; ++j) cell[j] += it->second[j] * coeff[j];
        }
        for (auto it = next.begin(); it != next.end();) {
            bool zero = std::all_of(it->second.begin(), it->second.end(),
                                    [](Nat n) { return n == 0; });
            it = zero ? next.erase(it) : std::next(it);
        }
        if (iterations) *iterations = i + 1;
        if (next == row) break;
        row = std::move(next);
    }
    return row;
}

SolveResult solve_capacity(const Graph& g, const FlowAssignment& inflow) {
    if (!scale_capable(g.domain))
        throw CapabilityError("capacity solve requires an endomorphic scale-edge domain, got " +
                              g.domain.name());
    size_t k = static_cast<size_t>(g.domain.arity);
    std::map<NodeId, std::vector<Nat>> totals;
    int iterations = 0;
    for (const auto& n : g.nodes) {
        const Value& in = lookup(inflow, n, "inflow");
        if (in.is_zero()) continue;
        int iters = 0;
        auto row = capacity_row(g, n, &iters);
        iterations = std::max(iterations, iters);
        std::vector<Nat> inv = (g.domain.kind == DomainKind::PathCount)
                                   ? std::vector<Nat>{in.nat}
                                   : in.vec;
        for (const auto& [t, coeff] : row) {
            if (!g.nodes.count(t)) continue;
            auto& cell = totals[t];
            if (cell.empty()) cell.assign(k, 0);
            for (size_t j = 0; j < k; ++j) cell[j] += inv[j] * coeff[j];
        }
    }
    FlowAssignment flow;
    for (const auto& n : g.nodes) {
        auto it = totals.find(n);
        if (it == totals.end()) {
            flow[n] = g.domain.zero();
        } else if (g.domain.kind == DomainKind::PathCount) {
            flow[n] = Value::of_nat(it->second[0]);
        } else {
            flow[n] = Value::of_vec(it->second);
        }
    }
    SolveResult r;
    r.iterations = iterations;
    if (!check_flow_eqn(g, inflow, flow).holds) {
        r.outcome = SolveOutcome::NoSolution;
        r.detail = "capacity candidate failed the flow equation";
        return r;
    }
    FlowGraph h;
    h.graph = g;
    h.flow = flow;
    h.inflow = inflow;
    EaResult ea = check_effectively_acyclic(h);
    if (!ea.ea) {
        r.outcome = SolveOutcome::NoSolution;
        r.detail = "capacity candidate is not effectively acyclic";
        return r;
    }
    r.outcome = SolveOutcome::Solved;
    r.flow = std::move(flow);
    return r;
}

SolveResult solve_kleene(const Graph& g, const FlowAssignment& inflow,
                         const SolveLimits& limits) {
    int bound;
    if (limits.max_iters) {
        bound = *limits.max_iters;
    } else if (g.domain.nilpotent_degree) {
        bound = *g.domain.nilpotent_degree * static_cast<int>(g.nodes.size()) + 1;
    } else {
        bound = 8 * static_cast<int>(g.nodes.size());
    }
    FlowAssignment cur;
    for (const auto& n : g.nodes) cur[n] = g.domain.zero();
    SolveResult r;
    for (int i = 1; i <= bound; ++i) {
        FlowAssignment next = equation_rhs(g, inflow, cur);
        r.iterations = i;
        if (next == cur) {
            // A fixpoint of the equation by construction; confirm anyway.
            if (!check_flow_eqn(g, inflow, cur).holds) {
                r.outcome = SolveOutcome::NoSolution;
                r.detail = "kleene fixpoint failed re-verification";
                return r;
            }
            r.outcome = SolveOutcome::Solved;
            r.flow = std::move(cur);
            return r;
        }
        cur = std::move(next);
    }
    r.outcome = SolveOutcome::NotConverged;
    r.detail = "no fixpoint within " + std::to_string(bound) + " iterations";
    return r;
}

SolveResult solve_oracle(const Graph& g, const FlowAssignment& inflow,
                         const SolveLimits& limits) {
    oracle::EnumBounds bounds;
    bounds.value_bound = limits.oracle_value_bound;
    bounds.state_cap = limits.oracle_state_cap;
    auto sols = oracle::enumerate_flows(g, inflow, bounds);
    SolveResult r;
    if (sols.empty()) {
        r.outcome = SolveOutcome::NoSolution;
        r.detail = "exhausted bounded search without a solution";
    } else if (sols.size() == 1) {
        r.outcome = SolveOutcome::Solved;
        r.flow = std::move(sols.front());
    } else {
        r.outcome = SolveOutcome::MultipleSolutions;
        r.detail = std::to_string(sols.size()) + " solutions within bounds";
    }
    return r;
}

} // namespace

SolveResult solve_flow(const Graph& g, const FlowAssignment& inflow,
                       SolveStrategy strategy, const SolveLimits& limits) {
    for (const auto& n : g.nodes) {
        const Value& v = lookup(inflow, n, "inflow");
        require_value(g.domain, v, "solve_flow inflow");
    }
    switch (strategy) {
    case SolveStrategy::Topo: return solve_topo(g, inflow);
    case SolveStrategy::Capacity: return solve_capacity(g, inflow);
    case SolveStrategy::Kleene: return solve_kleene(g, inflow, limits);
    case SolveStrategy::Oracle: return solve_oracle(g, inflow, limits);
    case SolveStrategy::Auto:
        if (nonzero_edge_acyclic(g)) return solve_topo(g, inflow);
        if (scale_capable(g.domain)) return solve_capacity(g, inflow);
        return solve_kleene(g, inflow, limits);
    }
    throw InputError("solve_flow: unknown strategy");
}

std::optional<FlowGraph> compose_flow_graphs(const FlowGraph& h1, const FlowGraph& h2) {
    if (h1.graph.domain != h2.graph.domain)
        throw InputError("compose: mismatched domains " + h1.graph.domain.name() + " vs " +
                         h2.graph.domain.name());
    for (const auto& n : h1.graph.nodes)
        if (h2.graph.nodes.count(n)) return std::nullopt;
    Graph g;
    g.domain = h1.graph.domain;
    g.nodes = h1.graph.nodes;
    g.nodes.insert(h2.graph.nodes.begin(), h2.graph.nodes.end());
    g.edges = h1.graph.edges;
    g.edges.insert(h2.graph.edges.begin(), h2.graph.edges.end());
    FlowAssignment flow = h1.flow;
    flow.insert(h2.flow.begin(), h2.flow.end());
    ValidateResult v = validate_flow_graph(g, flow);
    if (std::holds_alternative<NoInflow>(v)) return std::nullopt;
    return std::get<FlowGraph>(std::move(v));
}

FlowGraph restrict_flow_graph(const FlowGraph& h, const std::set<NodeId>& x) {
    Graph g;
    g.domain = h.graph.domain;
    for (const auto& n : x) {
        if (!h.graph.nodes.count(n))
            throw InputError("restrict: " + n + " is not a node of the graph");
        g.nodes.insert(n);
    }
    for (const auto& [key, e] : h.graph.edges)
        if (x.count(key.first)) g.edges[key] = e;
    FlowAssignment flow;
    for (const auto& n : x) flow[n] = h.flow.at(n);
    ValidateResult v = validate_flow_graph(g, flow);
    // A restriction of a flow graph always admits an inflow: the removed
    // contributions re-enter as inflow.
    if (std::holds_alternative<NoInflow>(v))
        throw InputError("restrict: interior state was not a flow graph");
    return std::get<FlowGraph>(std::move(v));
}

FlowGraph singleton_flow_graph(const FlowGraph& h, const NodeId& n) {
    return restrict_flow_graph(h, {n});
}

std::string solve_outcome_name(SolveOutcome o) {
    switch (o) {
    case SolveOutcome::Solved: return "solved";
    case SolveOutcome::NoSolution: return "no_solution";
    case SolveOutcome::NotConverged: return "not_converged";
    case SolveOutcome::MultipleSolutions: return "multiple_solutions";
    }
    return "unknown";
}

} // namespace flow
