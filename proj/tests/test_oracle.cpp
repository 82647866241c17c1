#include "fixtures.hpp"
#include "generators.hpp"

#include <doctest.h>

using namespace flow;
using namespace flow::oracle;

namespace {

// A valid flow graph that plants an identity two-cycle carrying `c` next to
// a solved DAG; effectively acyclic exactly when c is zero.
FlowGraph dag_with_cycle(const Domain& d, Rng& rng, Nat c) {
    RandomGraphSpec spec;
    spec.min_nodes = 2;
    spec.max_nodes = 4;
    ValueGenBounds b;
    FlowGraph h = testgen::solved_flow_graph(d, rng, spec, b);
    h.graph.add_node("cy1");
    h.graph.add_node("cy2");
    h.graph.set_edge("cy1", "cy2", EdgeFunction::identity());
    h.graph.set_edge("cy2", "cy1", EdgeFunction::identity());
    Value v = d.kind == DomainKind::PathCount
                  ? Value::of_nat(c)
                  : Value::of_vec(std::vector<Nat>(static_cast<size_t>(d.arity), c));
    h.flow["cy1"] = v;
    h.flow["cy2"] = v;
    h.inflow["cy1"] = d.zero();
    h.inflow["cy2"] = d.zero();
    return h;
}

} // namespace

TEST_CASE("enumeration finds the one DAG solution and nothing else") {
    Graph g;
    g.domain = Domain::path_count();
    for (const char* n : {"n1", "n2", "n3", "n4"}) g.add_node(n);
    g.set_edge("n1", "n2", EdgeFunction::identity());
    g.set_edge("n1", "n3", EdgeFunction::scale_vec({2}));
    g.set_edge("n2", "n4", EdgeFunction::identity());
    g.set_edge("n3", "n4", EdgeFunction::identity());
    FlowAssignment in = {{"n1", Value::of_nat(1)},
                         {"n2", Value::of_nat(0)},
                         {"n3", Value::of_nat(0)},
                         {"n4", Value::of_nat(0)}};
    auto sols = enumerate_flows(g, in);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].at("n4") == Value::of_nat(3));
    CHECK(check_flow_eqn(g, in, sols[0]).holds);
}

TEST_CASE("enumeration reports zero or many solutions as such") {
    auto [bad, bad_in] = fixtures::no_solution_graph();
    CHECK(enumerate_flows(bad, bad_in).empty());

    auto [open, open_in] = fixtures::many_solutions_graph();
    auto sols = enumerate_flows(open, open_in);
    CHECK(sols.size() == 5); // cycle value 0..4 within the default bound
    for (const auto& f : sols) CHECK(f.at("n2") == f.at("n3"));
}

TEST_CASE("enumeration enforces its resource bounds") {
    auto [open, open_in] = fixtures::many_solutions_graph();
    EnumBounds tight;
    tight.state_cap = 4;
    CHECK_THROWS_AS(enumerate_flows(open, open_in, tight), ResourceError);

    Graph big;
    big.domain = Domain::path_count();
    for (int i = 0; i < 9; ++i) big.add_node("n" + std::to_string(i));
    CHECK_THROWS_AS(enumerate_flows(big, {}), InputError);
}

TEST_CASE("the brute-force walk check matches the symbolic one") {
    EaResult good = check_effectively_acyclic(fixtures::swap_before_graph());
    CHECK(good.ea);
    CHECK(brute_cycle_check(fixtures::swap_before_graph(), 10) == std::nullopt);

    auto walk = brute_cycle_check(fixtures::swap_after_graph(), 10);
    REQUIRE(walk.has_value());
    CHECK(walk->size() >= 2);

    Rng rng(3);
    Domain pc = Domain::path_count();
    Domain prod = make_product_domain(pc, pc);
    for (int i = 0; i < 60; ++i) {
        const Domain& d = (i % 2 == 0) ? pc : prod;
        FlowGraph h = dag_with_cycle(d, rng, static_cast<Nat>(rng.below(3)));
        int max_len = 2 * static_cast<int>(h.graph.nodes.size());
        EaResult symbolic = check_effectively_acyclic(h);
        auto brute = brute_cycle_check(h, max_len);
        CHECK(symbolic.ea == !brute.has_value());
    }

    CHECK_THROWS_AS(brute_cycle_check(pip_flow_graph(fixtures::pip_example_state()), 4),
                    CapabilityError);
}

TEST_CASE("exhaustive footprint search confirms the pointwise footprint") {
    FlowGraph before = fixtures::swap_before_graph();
    FlowGraph after = fixtures::swap_after_graph();
    CHECK(minimal_footprint_search(before, after) == std::set<NodeId>{"n3", "n4"});
    CHECK(minimal_footprint_search(before, after) == footprint(before, after));
    CHECK(minimal_footprint_search(before, before).empty());

    Rng rng(9);
    RandomGraphSpec spec;
    spec.min_nodes = 3;
    spec.max_nodes = 5;
    ValueGenBounds b;
    int done = 0;
    for (int i = 0; done < 40 && i < 400; ++i) {
        FlowGraph h = testgen::solved_flow_graph(Domain::path_count(), rng, spec, b);
        Graph g2 = testgen::mutate_edges(h.graph, rng, b);
        SolveResult s = solve_flow(g2, h.inflow);
        if (s.outcome != SolveOutcome::Solved) continue;
        FlowGraph h2{g2, *s.flow, h.inflow};
        if (!(interface_of(h) == interface_of(h2))) continue;
        CHECK(minimal_footprint_search(h, h2) == footprint(h, h2));
        ++done;
    }
    CHECK(done == 40);
}

TEST_CASE("oracle interface composition agrees with the interface-level sum") {
    Rng rng(17);
    RandomGraphSpec spec;
    spec.min_nodes = 3;
    spec.max_nodes = 6;
    for (const Domain& d : {Domain::path_count(), Domain::pip()}) {
        ValueGenBounds b;
        for (int i = 0; i < 30; ++i) {
            FlowGraph h = testgen::solved_flow_graph(d, rng, spec, b);
            std::set<NodeId> x1;
            for (const auto& n : h.graph.nodes)
                if (rng.chance(1, 2)) x1.insert(n);
            std::set<NodeId> x2;
            for (const auto& n : h.graph.nodes)
                if (!x1.count(n)) x2.insert(n);
            FlowGraph h1 = restrict_flow_graph(h, x1);
            FlowGraph h2 = restrict_flow_graph(h, x2);
            auto direct = interface_compose(interface_of(h1), interface_of(h2));
            auto via_graphs = interface_compose_oracle(h1, h2);
            REQUIRE(direct.has_value());
            REQUIRE(via_graphs.has_value());
            CHECK(*direct == *via_graphs);
            CHECK(*direct == interface_of(h));

            // Overlapping pieces must be refused on both routes.
            if (!x1.empty()) {
                CHECK(interface_compose(interface_of(h1), interface_of(h)) == std::nullopt);
                CHECK(interface_compose_oracle(h1, h) == std::nullopt);
            }
        }
    }
}
