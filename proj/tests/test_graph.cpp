#include "fixtures.hpp"
#include "generators.hpp"

#include <doctest.h>

using namespace flow;

namespace {

Graph diamond() {
    // n1 fans out to n2 and n3, which rejoin at n4; the n1->n3 edge doubles.
    Graph g;
    g.domain = Domain::path_count();
    for (const char* n : {"n1", "n2", "n3", "n4"}) g.add_node(n);
    g.set_edge("n1", "n2", EdgeFunction::identity());
    g.set_edge("n1", "n3", EdgeFunction::scale_vec({2}));
    g.set_edge("n2", "n4", EdgeFunction::identity());
    g.set_edge("n3", "n4", EdgeFunction::identity());
    return g;
}

FlowAssignment diamond_inflow() {
    return {{"n1", Value::of_nat(1)},
            {"n2", Value::of_nat(0)},
            {"n3", Value::of_nat(0)},
            {"n4", Value::of_nat(0)}};
}

FlowAssignment diamond_flow() {
    return {{"n1", Value::of_nat(1)},
            {"n2", Value::of_nat(1)},
            {"n3", Value::of_nat(2)},
            {"n4", Value::of_nat(3)}};
}

} // namespace

TEST_CASE("edges are stored sparsely with zero meaning absent") {
    Graph g = diamond();
    CHECK(g.edge("n2", "n3").is_zero());
    CHECK(g.edge("n1", "n2") == EdgeFunction::identity());
    CHECK(g.out_edges("n1").size() == 2);
    g.set_edge("n1", "n2", EdgeFunction::zero());
    CHECK(g.edges.count({"n1", "n2"}) == 0);
    CHECK(g.out_edges("n1").size() == 1);
    CHECK_THROWS_AS(g.set_edge("nope", "n1", EdgeFunction::identity()), InputError);
    CHECK_THROWS_AS(g.set_edge("n1", "n2", EdgeFunction::max_with(1)), InputError);
}

TEST_CASE("the flow equation checker reports exact mismatches") {
    Graph g = diamond();
    FlowEqnReport ok = check_flow_eqn(g, diamond_inflow(), diamond_flow());
    CHECK(ok.holds);
    CHECK(ok.mismatches.empty());

    FlowAssignment bad = diamond_flow();
    bad["n4"] = Value::of_nat(5);
    FlowEqnReport rep = check_flow_eqn(g, diamond_inflow(), bad);
    CHECK(!rep.holds);
    REQUIRE(rep.mismatches.size() == 1);
    CHECK(rep.mismatches[0].node == "n4");
    CHECK(rep.mismatches[0].expected == Value::of_nat(3));
    CHECK(rep.mismatches[0].actual == Value::of_nat(5));

    FlowAssignment partial = diamond_flow();
    partial.erase("n2");
    CHECK_THROWS_AS(check_flow_eqn(g, diamond_inflow(), partial), InputError);
}

TEST_CASE("validation recovers the unique inflow or names the obstruction") {
    Graph g = diamond();
    auto r = validate_flow_graph(g, diamond_flow());
    REQUIRE(std::holds_alternative<FlowGraph>(r));
    CHECK(std::get<FlowGraph>(r).inflow == diamond_inflow());

    FlowAssignment starved = diamond_flow();
    starved["n4"] = Value::of_nat(1); // in-graph contributions already total 3
    auto bad = validate_flow_graph(g, starved);
    REQUIRE(std::holds_alternative<NoInflow>(bad));
    CHECK(std::get<NoInflow>(bad).node == "n4");
}

TEST_CASE("all strategies agree on a DAG") {
    Graph g = diamond();
    FlowAssignment in = diamond_inflow();
    for (SolveStrategy s : {SolveStrategy::Auto, SolveStrategy::Topo, SolveStrategy::Capacity,
                            SolveStrategy::Kleene, SolveStrategy::Oracle}) {
        SolveResult r = solve_flow(g, in, s);
        REQUIRE(r.outcome == SolveOutcome::Solved);
        CHECK(*r.flow == diamond_flow());
    }
}

TEST_CASE("topo refuses cyclic graphs outright") {
    auto [g, in] = fixtures::no_solution_graph();
    CHECK_THROWS_AS(solve_flow(g, in, SolveStrategy::Topo), InputError);
}

TEST_CASE("a cycle fed positive flow has no solution") {
    auto [g, in] = fixtures::no_solution_graph();
    CHECK(solve_flow(g, in, SolveStrategy::Capacity).outcome == SolveOutcome::NoSolution);
    CHECK(solve_flow(g, in, SolveStrategy::Auto).outcome == SolveOutcome::NoSolution);
    CHECK(solve_flow(g, in, SolveStrategy::Kleene).outcome == SolveOutcome::NotConverged);
    CHECK(solve_flow(g, in, SolveStrategy::Oracle).outcome == SolveOutcome::NoSolution);
}

TEST_CASE("an unfed cycle admits many solutions; the canonical one is zero") {
    auto [g, in] = fixtures::many_solutions_graph();
    SolveResult canonical = solve_flow(g, in, SolveStrategy::Auto);
    REQUIRE(canonical.outcome == SolveOutcome::Solved);
    CHECK(canonical.flow->at("n2") == Value::of_nat(0));
    CHECK(canonical.flow->at("n3") == Value::of_nat(0));
    CHECK(solve_flow(g, in, SolveStrategy::Oracle).outcome == SolveOutcome::MultipleSolutions);
}

TEST_CASE("kleene settles nilpotent cycles within the advertised bound") {
    Graph g;
    g.domain = Domain::inverse_reach();
    for (const char* n : {"n1", "n2", "n3"}) g.add_node(n);
    g.set_edge("n1", "n2", EdgeFunction::path_filter("n1"));
    g.set_edge("n2", "n3", EdgeFunction::path_filter("n2"));
    g.set_edge("n3", "n2", EdgeFunction::path_filter("n3"));
    FlowAssignment in = {{"n1", Value::of_set_multiset({{{}, 1}})},
                         {"n2", g.domain.zero()},
                         {"n3", g.domain.zero()}};
    SolveResult r = solve_flow(g, in, SolveStrategy::Kleene);
    REQUIRE(r.outcome == SolveOutcome::Solved);
    CHECK(r.iterations <= 2 * 3 + 1);
    CHECK(check_flow_eqn(g, in, *r.flow).holds);
    // The filter on (n3, n2) kills every set already containing n2.
    CHECK(r.flow->at("n2") ==
          Value::of_set_multiset({{{"n1"}, 1}, {{"n1", "n2", "n3"}, 1}}));
    CHECK(r.flow->at("n3") == Value::of_set_multiset({{{"n1", "n2"}, 1}}));
}

TEST_CASE("restriction splits a flow graph and composition reassembles it") {
    FlowGraph h = pip_flow_graph(fixtures::pip_example_state());
    std::set<NodeId> left = {"p1", "p2", "p3", "r1", "r2"};
    std::set<NodeId> right;
    for (const NodeId& n : h.graph.nodes)
        if (!left.count(n)) right.insert(n);

    FlowGraph hl = restrict_flow_graph(h, left);
    FlowGraph hr = restrict_flow_graph(h, right);
    CHECK(hl.graph.nodes == left);
    auto back = compose_flow_graphs(hl, hr);
    REQUIRE(back.has_value());
    CHECK(*back == h);
    CHECK(compose_flow_graphs(hl, h) == std::nullopt); // overlapping node sets
}

TEST_CASE("composition refuses pieces that disagree about cross flow") {
    Graph ga;
    ga.domain = Domain::path_count();
    ga.add_node("a");
    ga.set_edge("a", "b", EdgeFunction::identity());
    FlowGraph h1{ga, {{"a", Value::of_nat(1)}}, {{"a", Value::of_nat(1)}}};

    Graph gb;
    gb.domain = Domain::path_count();
    gb.add_node("b");
    FlowGraph starved{gb, {{"b", Value::of_nat(0)}}, {{"b", Value::of_nat(0)}}};
    CHECK(compose_flow_graphs(h1, starved) == std::nullopt);

    FlowGraph fed{gb, {{"b", Value::of_nat(1)}}, {{"b", Value::of_nat(1)}}};
    auto joined = compose_flow_graphs(h1, fed);
    REQUIRE(joined.has_value());
    CHECK(joined->inflow.at("b") == Value::of_nat(0));
    CHECK(joined->flow.at("b") == Value::of_nat(1));
}

TEST_CASE("outflow sums the contributions leaving the region") {
    FlowGraph h = fixtures::swap_before_graph();
    FlowGraph region = restrict_flow_graph(h, {"n3", "n4"});
    FlowAssignment out = compute_outflow(region);
    CHECK(out == FlowAssignment{{"n2", Value::of_nat(1)}, {"n5", Value::of_nat(1)}});

    FlowGraph single = singleton_flow_graph(h, "n1");
    CHECK(single.graph.nodes == std::set<NodeId>{"n1"});
    CHECK(compute_outflow(single) == FlowAssignment{{"n3", Value::of_nat(1)}});
}

TEST_CASE("random solved graphs satisfy the equation they were solved for") {
    Rng rng(7);
    RandomGraphSpec spec;
    spec.max_nodes = 6;
    for (const Domain& d :
         {Domain::path_count(), make_product_domain(Domain::path_count(), Domain::path_count())}) {
        for (int i = 0; i < 25; ++i) {
            ValueGenBounds b;
            FlowGraph h = testgen::solved_flow_graph(d, rng, spec, b);
            CHECK(check_flow_eqn(h.graph, h.inflow, h.flow).holds);
            auto v = validate_flow_graph(h.graph, h.flow);
            REQUIRE(std::holds_alternative<FlowGraph>(v));
            CHECK(std::get<FlowGraph>(v).inflow == h.inflow);
        }
    }
}
