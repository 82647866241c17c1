#include "flow/generate.hpp"

#include "flow/extension.hpp"

#include <algorithm>

namespace flow {

Value random_value(const Domain& d, Rng& rng, const ValueGenBounds& b) {
    switch (d.value_kind()) {
    case ValueKind::Nat:
        return Value::of_nat(rng.below(b.max_nat + 1));
    case ValueKind::NatVec: {
        std::vector<Nat> v(static_cast<size_t>(d.arity));
        for (auto& c : v) c = rng.below(b.max_nat + 1);
        return Value::of_vec(std::move(v));
    }
    case ValueKind::MultisetNat: {
        Value v = d.zero();
        int entries = static_cast<int>(rng.below(static_cast<Nat>(b.max_entries) + 1));
        for (int i = 0; i < entries; ++i)
            v.ms_nat[rng.below(b.max_elem + 1)] = 1 + rng.below(b.max_count);
        return v;
    }
    case ValueKind::MultisetCost: {
        Value v = d.zero();
        int entries = static_cast<int>(rng.below(static_cast<Nat>(b.max_entries) + 1));
        for (int i = 0; i < entries; ++i) {
            Cost c = rng.chance(1, 8) ? Cost::infinity() : Cost::of(rng.below(b.max_elem + 1));
            v.ms_cost[c] = 1 + rng.below(b.max_count);
        }
        return v;
    }
    case ValueKind::MultisetNodeSet: {
        if (b.universe.empty()) throw InputError("random_value: node universe is empty");
        Value v = d.zero();
        int entries = static_cast<int>(rng.below(static_cast<Nat>(b.max_entries) + 1));
        for (int i = 0; i < entries; ++i) {
            std::set<NodeId> s;
            int size = static_cast<int>(rng.below(static_cast<Nat>(b.max_set_size) + 1));
            for (int j = 0; j < size; ++j)
                s.insert(b.universe[rng.below(b.universe.size())]);
            v.ms_sets[s] = 1 + rng.below(b.max_count);
        }
        return v;
    }
    }
    throw InputError("random_value: unknown value kind");
}

EdgeFunction random_edge(const Domain& d, Rng& rng, const ValueGenBounds& b) {
    switch (d.kind) {
    case DomainKind::PathCount:
    case DomainKind::Product: {
        std::vector<Nat> c(static_cast<size_t>(d.arity));
        bool nonzero = false;
        for (auto& x : c) {
            x = rng.below(3); // coefficients 0..2 keep values small
            nonzero = nonzero || x > 0;
        }
        if (!nonzero) c[rng.below(c.size())] = 1;
        if (std::all_of(c.begin(), c.end(), [](Nat x) { return x == 1; }))
            return EdgeFunction::identity();
        return EdgeFunction::scale_vec(std::move(c));
    }
    case DomainKind::Pip:
        return EdgeFunction::max_with(rng.below(b.max_elem + 1));
    case DomainKind::ShortestPath:
        return EdgeFunction::add_min_with(Cost::of(rng.below(b.max_elem + 1)));
    case DomainKind::InverseReach: {
        if (b.universe.empty()) throw InputError("random_edge: node universe is empty");
        return EdgeFunction::path_filter(b.universe[rng.below(b.universe.size())]);
    }
    }
    throw InputError("random_edge: unknown domain");
}

RandomGraph random_graph(const Domain& d, Rng& rng, const RandomGraphSpec& spec,
                         const ValueGenBounds& b) {
    RandomGraph out;
    out.graph.domain = d;
    int n = spec.min_nodes +
            static_cast<int>(rng.below(static_cast<Nat>(spec.max_nodes - spec.min_nodes) + 1));
    for (int i = 0; i < n; ++i) {
        NodeId id = "n" + std::to_string(i);
        out.order.push_back(id);
        out.graph.add_node(id);
    }
    ValueGenBounds vb = b;
    if (d.kind == DomainKind::InverseReach && vb.universe.empty()) vb.universe = out.order;

    // Sparse backbone: every node past the first gets one incoming edge.
    for (int i = 1; i < n; ++i) {
        size_t from = rng.below(static_cast<Nat>(i));
        out.graph.set_edge(out.order[from], out.order[i], random_edge(d, rng, vb));
    }
    for (int k = 0; k < spec.extra_edges; ++k) {
        size_t a = rng.below(static_cast<Nat>(n));
        size_t p = rng.below(static_cast<Nat>(n));
        if (a == p) continue;
        if (spec.acyclic && a > p) std::swap(a, p);
        if (!spec.acyclic && rng.chance(1, 4)) std::swap(a, p); // allow back edges
        if (a == p || !out.graph.edge(out.order[a], out.order[p]).is_zero()) continue;
        out.graph.set_edge(out.order[a], out.order[p], random_edge(d, rng, vb));
    }

    for (int k = 0; k < spec.inflow_entries; ++k) {
        const NodeId& at = out.order[rng.below(static_cast<Nat>(n))];
        out.inflow[at] = random_value(d, rng, vb);
    }
    for (const auto& id : out.order)
        if (!out.inflow.count(id)) out.inflow[id] = d.zero();
    // The sources must inject something or the whole flow can collapse to zero.
    bool any = std::any_of(out.inflow.begin(), out.inflow.end(),
                           [](const auto& e) { return !e.second.is_zero(); });
    if (!any) {
        Value v = random_value(d, rng, vb);
        while (v.is_zero()) v = random_value(d, rng, vb);
        out.inflow[out.order[0]] = std::move(v);
    }
    return out;
}

FlowGraph random_ea_flow_graph(const Domain& d, Rng& rng, const RandomGraphSpec& spec,
                               const ValueGenBounds& b) {
    if (!d.endomorphic)
        throw CapabilityError("random EA flow graph needs an endomorphic domain, got " + d.name());
    for (int attempt = 0; attempt < 64; ++attempt) {
        RandomGraphSpec sp = spec;
        sp.acyclic = true;
        RandomGraph rg = random_graph(d, rng, sp, b);

        // Occasionally overlay a product cycle that mixes the two components,
        // so the graph is cyclic yet every cycle composes to zero.
        if (d.kind == DomainKind::Product && rg.order.size() >= 2 && rng.chance(1, 3)) {
            size_t k = static_cast<size_t>(d.arity);
            size_t half = k / 2;
            auto route = [&](bool first) {
                std::vector<Nat> c(k, 0);
                for (size_t j = 0; j < k; ++j)
                    if ((j < half) == first) c[j] = 1;
                return EdgeFunction::scale_vec(c);
            };
            const NodeId& a = rg.order[0];
            const NodeId& z = rg.order[rg.order.size() - 1];
            rg.graph.set_edge(a, z, route(true));
            rg.graph.set_edge(z, a, route(false));
        }

        auto solved = solve_flow(rg.graph, rg.inflow, SolveStrategy::Auto);
        if (solved.outcome != SolveOutcome::Solved) continue;
        FlowGraph h{rg.graph, *solved.flow, rg.inflow};
        if (!check_effectively_acyclic(h).ea) continue;
        return h;
    }
    throw ResourceError("random EA flow graph: no instance after 64 attempts");
}

} // namespace flow
