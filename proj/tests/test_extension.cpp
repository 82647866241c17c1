#include "fixtures.hpp"
#include "generators.hpp"

#include <doctest.h>

using namespace flow;

namespace {

// Removing the waiting edge p -> r from the example protocol state, with the
// downstream prios repaired so the result is again a valid state.
PipState drop_waiting_edge(PipState s, const NodeId& p, const NodeId& r) {
    s.nodes.at(p).next.reset();
    Value sent = edge_eval(Domain::pip(), EdgeFunction::max_with(s.nodes.at(p).def_prio),
                           s.nodes.at(p).prios);
    Value& rp = s.nodes.at(r).prios;
    rp = *monoid_subtract(rp, sent);
    Nat best = s.nodes.at(r).def_prio;
    for (const auto& [e, c] : rp.ms_nat) best = std::max(best, e);
    s.nodes.at(r).curr_prio = best;
    return s;
}

} // namespace

TEST_CASE("capacity tabulates path products up to the node count") {
    Graph g;
    g.domain = Domain::path_count();
    for (const char* n : {"n1", "n2", "n3", "n4"}) g.add_node(n);
    g.set_edge("n1", "n2", EdgeFunction::identity());
    g.set_edge("n1", "n3", EdgeFunction::scale_vec({2}));
    g.set_edge("n2", "n4", EdgeFunction::identity());
    g.set_edge("n3", "n4", EdgeFunction::identity());
    Capacity cap = capacity(g);
    CHECK(cap.depth == 4);
    CHECK(cap.at("n1", "n1") == std::vector<Nat>{1});
    CHECK(cap.at("n1", "n2") == std::vector<Nat>{1});
    CHECK(cap.at("n1", "n3") == std::vector<Nat>{2});
    CHECK(cap.at("n1", "n4") == std::vector<Nat>{3});
    CHECK(cap.at("n2", "n1") == std::vector<Nat>{0});
    CHECK(cap.at("n4", "n4") == std::vector<Nat>{1});
    CHECK_THROWS_AS(capacity(Graph{Domain::pip(), {}, {}}), CapabilityError);
}

TEST_CASE("effective acyclicity notices the closed n4/n5 loop") {
    EaResult before = check_effectively_acyclic(fixtures::swap_before_graph());
    CHECK(before.ea);
    CHECK(before.witness_cycle.empty());

    EaResult after = check_effectively_acyclic(fixtures::swap_after_graph());
    CHECK(!after.ea);
    CHECK(after.witness_cycle == std::vector<NodeId>{"n4", "n5"});

    FlowGraph pip = pip_flow_graph(fixtures::pip_example_state());
    CHECK_THROWS_AS(check_effectively_acyclic(pip), CapabilityError);
}

TEST_CASE("a zero-flow cycle is effectively acyclic") {
    auto [g, in] = fixtures::many_solutions_graph();
    FlowGraph h{g,
                {{"n1", Value::of_nat(1)}, {"n2", Value::of_nat(0)}, {"n3", Value::of_nat(0)}},
                in};
    CHECK(check_flow_eqn(g, in, h.flow).holds);
    CHECK(check_effectively_acyclic(h).ea);
}

TEST_CASE("contextual extension keeps old inflows and all outside outflow") {
    FlowGraph region = restrict_flow_graph(fixtures::swap_before_graph(), {"n3", "n4"});
    Interface i1 = interface_of(region);
    CHECK(contextual_extension(i1, i1));

    FlowGraph grown = testgen::with_fresh_sink(region, "n9");
    Interface i2 = interface_of(grown);
    CHECK(contextual_extension(i1, i2));
    CHECK(!contextual_extension(i2, i1)); // the smaller one cannot cover n9

    Interface louder = i2;
    louder.out["n5"] = Value::of_nat(2); // extra outflow the context would see
    CHECK(!contextual_extension(i1, louder));
}

TEST_CASE("the swapped region is contextual but not subflow-preserving") {
    FlowGraph before = restrict_flow_graph(fixtures::swap_before_graph(), {"n3", "n4"});
    FlowGraph after = restrict_flow_graph(fixtures::swap_after_graph(), {"n3", "n4"});
    CHECK(contextual_extension(interface_of(before), interface_of(after)));
    CHECK(!subflow_preserving_extension(before, after));
    // Symbolic and enumerative routes agree on the refusal.
    CHECK(!subflow_preserving_extension(before, after, SubflowMode::Symbolic));
    CHECK(!subflow_preserving_extension(before, after, SubflowMode::Enumerate));
}

TEST_CASE("adding a private sink preserves subflows on both routes") {
    FlowGraph region = restrict_flow_graph(fixtures::swap_before_graph(), {"n3", "n4"});
    FlowGraph grown = testgen::with_fresh_sink(region, "n9");
    CHECK(subflow_preserving_extension(region, grown, SubflowMode::Symbolic));
    CHECK(subflow_preserving_extension(region, grown, SubflowMode::Enumerate));
}

TEST_CASE("equal-interface replacement rebuilds the swapped graph exactly") {
    FlowGraph h = fixtures::swap_before_graph();
    FlowGraph h1new = restrict_flow_graph(fixtures::swap_after_graph(), {"n3", "n4"});
    ReplaceResult r = replace_region(h, {"n3", "n4"}, h1new, ReplaceMode::Equal);
    REQUIRE(std::holds_alternative<ReplaceReport>(r));
    const ReplaceReport& rep = std::get<ReplaceReport>(r);
    CHECK(rep.interface_equal);
    CHECK(rep.interface_extended);
    CHECK(rep.result == fixtures::swap_after_graph());
}

TEST_CASE("subflow-mode replacement rejects the swap and explains why") {
    FlowGraph h = fixtures::swap_before_graph();
    FlowGraph h1new = restrict_flow_graph(fixtures::swap_after_graph(), {"n3", "n4"});
    ReplaceResult r = replace_region(h, {"n3", "n4"}, h1new, ReplaceMode::Subflow);
    REQUIRE(std::holds_alternative<ReplaceError>(r));
    CHECK(std::get<ReplaceError>(r).code == ReplaceErrorCode::NotSubflowPreserving);

    // With a non-EA input the mode refuses before looking at the region.
    ReplaceResult r2 = replace_region(fixtures::swap_after_graph(), {"n3", "n4"},
                                      restrict_flow_graph(fixtures::swap_before_graph(),
                                                          {"n3", "n4"}),
                                      ReplaceMode::Subflow);
    REQUIRE(std::holds_alternative<ReplaceError>(r2));
    CHECK(std::get<ReplaceError>(r2).code == ReplaceErrorCode::InputNotEa);
}

TEST_CASE("subflow-mode replacement accepts a fresh sink and stays EA") {
    FlowGraph h = fixtures::swap_before_graph();
    FlowGraph region = restrict_flow_graph(h, {"n3", "n4"});
    FlowGraph grown = testgen::with_fresh_sink(region, "n9");
    ReplaceResult r = replace_region(h, {"n3", "n4"}, grown, ReplaceMode::Subflow);
    REQUIRE(std::holds_alternative<ReplaceReport>(r));
    const ReplaceReport& rep = std::get<ReplaceReport>(r);
    CHECK(!rep.interface_equal);
    CHECK(rep.interface_extended);
    REQUIRE(rep.result_ea.has_value());
    CHECK(*rep.result_ea);
    CHECK(rep.result.graph.nodes.count("n9") == 1);
    CHECK(rep.result.flow.at("n9") == Value::of_nat(1));
    CHECK(contextual_extension(interface_of(h), interface_of(rep.result)));
}

TEST_CASE("contextual-mode replacement polices inflow agreement and fresh nodes") {
    FlowGraph h = fixtures::swap_before_graph();
    FlowGraph region = restrict_flow_graph(h, {"n3", "n4"});

    FlowGraph louder = region;
    louder.flow["n3"] = Value::of_nat(2);
    louder.inflow["n3"] = Value::of_nat(2);
    ReplaceResult r = replace_region(h, {"n3", "n4"}, louder, ReplaceMode::Contextual);
    REQUIRE(std::holds_alternative<ReplaceError>(r));
    CHECK(std::get<ReplaceError>(r).code == ReplaceErrorCode::NotContextual);

    // A chain whose tail dangles at d: claiming d as a new region node
    // collides with the context's outflow into it.
    Graph g;
    g.domain = Domain::path_count();
    for (const char* n : {"a", "b", "c"}) g.add_node(n);
    g.set_edge("a", "b", EdgeFunction::identity());
    g.set_edge("b", "c", EdgeFunction::identity());
    g.set_edge("c", "d", EdgeFunction::identity());
    FlowGraph chain{g,
                    {{"a", Value::of_nat(1)}, {"b", Value::of_nat(1)}, {"c", Value::of_nat(1)}},
                    {{"a", Value::of_nat(1)}, {"b", Value::of_nat(0)}, {"c", Value::of_nat(0)}}};
    FlowGraph claimer = restrict_flow_graph(chain, {"b"});
    claimer.graph.add_node("d");
    claimer.flow["d"] = Value::of_nat(0);
    claimer.inflow["d"] = Value::of_nat(0);
    ReplaceResult r2 = replace_region(chain, {"b"}, claimer, ReplaceMode::Contextual);
    REQUIRE(std::holds_alternative<ReplaceError>(r2));
    CHECK(std::get<ReplaceError>(r2).code == ReplaceErrorCode::FreshNodeContextInflow);
}

TEST_CASE("the whole-graph swap touches exactly the rewired nodes") {
    FlowGraph before = fixtures::swap_before_graph();
    FlowGraph after = fixtures::swap_after_graph();
    CHECK(footprint(before, before).empty());
    CHECK(footprint(before, after) == std::set<NodeId>{"n3", "n4"});

    FlowGraph shorter = restrict_flow_graph(before, {"n1", "n2", "n3"});
    CHECK_THROWS_AS(footprint(before, shorter), InputError);
}

TEST_CASE("acquiring the contested resource touches the whole blocking chain") {
    PipState s = fixtures::pip_example_state();
    PipState s2 = pip_acquire(s, "p1", "r1");
    std::set<NodeId> fp = footprint(pip_flow_graph(s), pip_flow_graph(s2));
    CHECK(fp == std::set<NodeId>{"p1", "p2", "p3", "r1", "r2", "r3"});
}

TEST_CASE("dropping a leaf waiter touches only the pair") {
    PipState s = fixtures::pip_example_state();
    PipState s2 = drop_waiting_edge(s, "p6", "r4");
    CHECK(s2.nodes.at("r4").prios == Value::of_multiset({2}));
    std::set<NodeId> fp = footprint(pip_flow_graph(s), pip_flow_graph(s2));
    CHECK(fp == std::set<NodeId>{"p6", "r4"});
}

TEST_CASE("dropping a chain waiter leaks one node further") {
    PipState s = fixtures::pip_example_state();
    PipState s2 = drop_waiting_edge(s, "p2", "r2");
    // r2 now sends {0} instead of {1} to p3, so p3's flow moves too; r3
    // absorbs the difference because p3's default already dominates.
    s2.nodes.at("p3").prios = Value::of_multiset({0});
    std::set<NodeId> fp = footprint(pip_flow_graph(s), pip_flow_graph(s2));
    CHECK(fp == std::set<NodeId>{"p2", "r2", "p3"});
}
