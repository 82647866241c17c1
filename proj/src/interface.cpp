#include "flow/interface.hpp"

#include "flow/generate.hpp"

namespace flow {

Interface interface_of(const FlowGraph& h) {
    Interface i;
    i.domain = h.graph.domain;
    i.dom = h.graph.nodes;
    i.in = h.inflow;
    i.out = compute_outflow(h);
    return i;
}

Interface identity_interface(const Domain& d) {
    Interface i;
    i.domain = d;
    return i;
}

bool is_identity_interface(const Interface& i) {
    return i.dom.empty() && i.out.empty();
}

std::optional<Interface> interface_compose(const Interface& i1, const Interface& i2) {
    if (i1.domain != i2.domain)
        throw InputError("interface_compose: mismatched flow domains " + i1.domain.name() +
                         " vs " + i2.domain.name());
    for (const auto& n : i1.dom)
        if (i2.dom.count(n)) return std::nullopt;

    Interface out;
    out.domain = i1.domain;
    out.dom = i1.dom;
    out.dom.insert(i2.dom.begin(), i2.dom.end());

    auto boundary = [&](const Interface& mine, const Interface& other) -> bool {
        for (const auto& n : mine.dom) {
            const Value& required = mine.in.at(n);
            auto sent = other.out.find(n);
            if (sent == other.out.end()) {
                out.in[n] = required;
                continue;
            }
            // The other region feeds this node; the composite inflow is the
            // remainder, and it must exist (in1(n) = in(n) + out2(n)).
            auto rest = monoid_subtract(required, sent->second);
            if (!rest) return false;
            out.in[n] = std::move(*rest);
        }
        return true;
    };
    if (!boundary(i1, i2) || !boundary(i2, i1)) return std::nullopt;

    for (const auto& [n, v] : i1.out) {
        if (out.dom.count(n)) continue;
        out.out[n] = v;
    }
    for (const auto& [n, v] : i2.out) {
        if (out.dom.count(n)) continue;
        auto it = out.out.find(n);
        if (it == out.out.end())
            out.out[n] = v;
        else
            it->second = monoid_add(it->second, v);
    }
    return out;
}

namespace {

// Random valid flow graph: solve a random DAG for its unique flow.
FlowGraph random_flow_graph(const Domain& d, Rng& rng, const RandomGraphSpec& spec,
                            const ValueGenBounds& b) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        RandomGraph rg = random_graph(d, rng, spec, b);
        SolveResult s = solve_flow(rg.graph, rg.inflow, SolveStrategy::Topo);
        if (s.outcome != SolveOutcome::Solved) continue;
        FlowGraph h;
        h.graph = rg.graph;
        h.flow = *s.flow;
        h.inflow = rg.inflow;
        return h;
    }
    throw ResourceError("random_flow_graph: no solvable instance found");
}

std::set<NodeId> random_subset(const std::set<NodeId>& nodes, Rng& rng) {
    std::set<NodeId> x;
    for (const auto& n : nodes)
        if (rng.chance(1, 2)) x.insert(n);
    return x;
}

std::string render_nodes(const std::set<NodeId>& ns) {
    std::string s = "{";
    for (const auto& n : ns) s += n + ",";
    s += "}";
    return s;
}

} // namespace

AlgebraLawReport check_separation_algebra_laws(const Domain& d, std::uint64_t seed, int cases) {
    AlgebraLawReport report;
    Rng rng(seed);
    ValueGenBounds bounds;
    auto fail = [&](const std::string& what) {
        report.ok = false;
        if (report.failures.size() < 8) report.failures.push_back(what);
    };
    auto eq_opt = [](const std::optional<Interface>& a, const std::optional<Interface>& b) {
        if (a.has_value() != b.has_value()) return false;
        return !a || *a == *b;
    };

    for (int i = 0; i < cases; ++i) {
        RandomGraphSpec spec;
        spec.min_nodes = 3;
        spec.max_nodes = 6;
        bounds.universe.clear();
        FlowGraph h = random_flow_graph(d, rng, spec, bounds);
        bounds.universe.assign(h.graph.nodes.begin(), h.graph.nodes.end());

        // Carve the graph into three regions; their interfaces compose by
        // construction, which exercises the defined side of every law.
        std::set<NodeId> x1 = random_subset(h.graph.nodes, rng);
        std::set<NodeId> rest;
        for (const auto& n : h.graph.nodes)
            if (!x1.count(n)) rest.insert(n);
        std::set<NodeId> x2 = random_subset(rest, rng);
        std::set<NodeId> x3;
        for (const auto& n : rest)
            if (!x2.count(n)) x3.insert(n);

        Interface i1 = interface_of(restrict_flow_graph(h, x1));
        Interface i2 = interface_of(restrict_flow_graph(h, x2));
        Interface i3 = interface_of(restrict_flow_graph(h, x3));

        if (!eq_opt(interface_compose(i1, i2), interface_compose(i2, i1)))
            fail("commutativity on " + render_nodes(x1) + " / " + render_nodes(x2));

        auto a12 = interface_compose(i1, i2);
        auto left = a12 ? interface_compose(*a12, i3) : std::nullopt;
        auto a23 = interface_compose(i2, i3);
        auto right = a23 ? interface_compose(i1, *a23) : std::nullopt;
        if (!eq_opt(left, right)) fail("associativity (case " + std::to_string(i) + ")");
        if (left && *left != interface_of(h)) fail("three-way recomposition mismatch");

        Interface unit = identity_interface(d);
        auto with_unit = interface_compose(i1, unit);
        if (!with_unit || *with_unit != i1) fail("identity on " + render_nodes(x1));

        // Cancellativity probe (contrapositive): distinct second operands
        // that both compose against i1 must give distinct composites.
        if (!x2.empty() && !x3.empty() && a23) {
            Interface i23 = *a23;
            if (i2 != i23) {
                auto c1 = interface_compose(i1, i2);
                auto c2 = interface_compose(i1, i23);
                if (c1 && c2 && *c1 == *c2)
                    fail("cancellativity (case " + std::to_string(i) + ")");
            }
        }
        // Direct perturbation: grow one inflow entry of i2; the composite
        // with i1 must change or become undefined.
        if (!x2.empty()) {
            Interface bumped = i2;
            auto it = bumped.in.begin();
            std::advance(it, rng.below(bumped.in.size()));
            Value unitval = random_value(d, rng, bounds);
            if (!unitval.is_zero()) {
                it->second = monoid_add(it->second, unitval);
                auto c1 = interface_compose(i1, i2);
                auto c2 = interface_compose(i1, bumped);
                if (c1 && c2 && *c1 == *c2)
                    fail("cancellativity under perturbation (case " + std::to_string(i) + ")");
            }
        }
    }
    report.cases = cases;
    return report;
}

AlgebraLawReport check_congruence(const Domain& d, std::uint64_t seed, int cases) {
    AlgebraLawReport report;
    Rng rng(seed);
    ValueGenBounds bounds;
    auto fail = [&](const std::string& what) {
        report.ok = false;
        if (report.failures.size() < 8) report.failures.push_back(what);
    };

    for (int i = 0; i < cases; ++i) {
        RandomGraphSpec spec;
        spec.min_nodes = 2;
        spec.max_nodes = 8;
        // EA instances where the domain admits them, plain valid flow graphs
        // elsewhere; congruence itself needs no acyclicity.
        bounds.universe.clear();
        FlowGraph h = d.endomorphic ? random_ea_flow_graph(d, rng, spec, bounds)
                                    : random_flow_graph(d, rng, spec, bounds);
        bounds.universe.assign(h.graph.nodes.begin(), h.graph.nodes.end());
        std::set<NodeId> x1 = random_subset(h.graph.nodes, rng);
        std::set<NodeId> x2;
        for (const auto& n : h.graph.nodes)
            if (!x1.count(n)) x2.insert(n);

        FlowGraph h1 = restrict_flow_graph(h, x1);
        FlowGraph h2 = restrict_flow_graph(h, x2);
        auto composed = compose_flow_graphs(h1, h2);
        if (!composed) {
            fail("bipartition failed to recompose (case " + std::to_string(i) + ")");
            continue;
        }
        if (*composed != h) fail("recomposition changed the graph (case " + std::to_string(i) + ")");

        auto iface = interface_compose(interface_of(h1), interface_of(h2));
        if (!iface) {
            fail("interface composition undefined on a decomposition (case " +
                 std::to_string(i) + ")");
            continue;
        }
        if (*iface != interface_of(h))
            fail("interface congruence mismatch (case " + std::to_string(i) + ")");

        // Definedness agreement on clashing pieces: bump inflow and flow at a
        // node that feeds no other node of x1. The region stays a valid flow
        // graph, only its boundary values move, so composing with h2 must
        // succeed or fail identically on the graph and interface sides.
        if (!x1.empty() && !x2.empty()) {
            std::vector<NodeId> sinks;
            for (const auto& n : x1) {
                bool feeds_region = false;
                for (const auto& [to, e] : h1.graph.out_edges(n))
                    if (x1.count(to) && !e->is_zero()) feeds_region = true;
                if (!feeds_region) sinks.push_back(n);
            }
            Value bump = random_value(d, rng, bounds);
            if (!sinks.empty() && !bump.is_zero()) {
                FlowGraph skew = h1;
                const NodeId& at = sinks[rng.below(sinks.size())];
                skew.flow[at] = monoid_add(skew.flow.at(at), bump);
                skew.inflow[at] = monoid_add(skew.inflow.at(at), bump);
                auto g2 = compose_flow_graphs(skew, h2);
                auto if2 = interface_compose(interface_of(skew), interface_of(h2));
                if (g2.has_value() != if2.has_value())
                    fail("definedness disagreement under perturbation (case " +
                         std::to_string(i) + ")");
                if (g2 && if2 && interface_of(*g2) != *if2)
                    fail("perturbed congruence mismatch (case " + std::to_string(i) + ")");
            }
        }
    }
    report.cases = cases;
    return report;
}

} // namespace flow
