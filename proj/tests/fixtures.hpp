#pragma once

#include "flow/extension.hpp"
#include "flow/pip.hpp"

namespace flow::fixtures {

/// Protocol state with seven processes and four resources. The waiting
/// chain r1 -> p2 -> r2 -> p3 -> r3 -> p1 is one acquire(p1, r1) away from
/// closing into a cycle; p4 and p5 wait on r3, p6 and p7 on r4.
inline PipState pip_example_state() {
    PipState s;
    auto proc = [&](const NodeId& id, Nat def) {
        PipNode n;
        n.def_prio = def;
        n.curr_prio = def;
        s.nodes[id] = std::move(n);
        s.kinds[id] = PipKind::Process;
    };
    auto res = [&](const NodeId& id) {
        s.nodes[id] = PipNode{};
        s.kinds[id] = PipKind::Resource;
    };
    proc("p1", 3);
    proc("p2", 1);
    proc("p3", 2);
    proc("p4", 1);
    proc("p5", 2);
    proc("p6", 2);
    proc("p7", 2);
    res("r1");
    res("r2");
    res("r3");
    res("r4");

    auto link = [&](const NodeId& from, const NodeId& to) { s.nodes[from].next = to; };
    link("r1", "p2");
    link("p2", "r2");
    link("r2", "p3");
    link("p3", "r3");
    link("r3", "p1");
    link("p4", "r3");
    link("p5", "r3");
    link("p6", "r4");
    link("p7", "r4");

    auto prios = [&](const NodeId& id, std::initializer_list<Nat> ms) {
        s.nodes[id].prios = Value::of_multiset(ms);
        Nat m = s.nodes[id].def_prio;
        for (Nat x : ms) m = std::max(m, x);
        s.nodes[id].curr_prio = m;
    };
    prios("p1", {2});
    prios("p2", {0});
    prios("p3", {1});
    prios("r2", {1});
    prios("r3", {1, 2, 2});
    prios("r4", {2, 2});
    return s;
}

/// Three path-count nodes where n2 and n3 feed each other and n1 feeds n2:
/// flow(n2) = 1 + flow(n2) has no solution.
inline std::pair<Graph, FlowAssignment> no_solution_graph() {
    Graph g;
    g.domain = Domain::path_count();
    for (const char* n : {"n1", "n2", "n3"}) g.add_node(n);
    g.set_edge("n1", "n2", EdgeFunction::identity());
    g.set_edge("n2", "n3", EdgeFunction::identity());
    g.set_edge("n3", "n2", EdgeFunction::identity());
    FlowAssignment in;
    in["n1"] = Value::of_nat(1);
    in["n2"] = Value::of_nat(0);
    in["n3"] = Value::of_nat(0);
    return {std::move(g), std::move(in)};
}

/// Same three nodes, but the two-node cycle is detached from the source:
/// flow(n2) = flow(n3) = x for every x.
inline std::pair<Graph, FlowAssignment> many_solutions_graph() {
    Graph g;
    g.domain = Domain::path_count();
    for (const char* n : {"n1", "n2", "n3"}) g.add_node(n);
    g.set_edge("n2", "n3", EdgeFunction::identity());
    g.set_edge("n3", "n2", EdgeFunction::identity());
    FlowAssignment in;
    in["n1"] = Value::of_nat(1);
    in["n2"] = Value::of_nat(0);
    in["n3"] = Value::of_nat(0);
    return {std::move(g), std::move(in)};
}

namespace detail {

inline FlowGraph chain_five(const std::vector<std::pair<const char*, const char*>>& edges) {
    Graph g;
    g.domain = Domain::path_count();
    for (const char* n : {"n1", "n2", "n3", "n4", "n5"}) g.add_node(n);
    for (const auto& [a, b] : edges) g.set_edge(a, b, EdgeFunction::identity());
    FlowGraph h;
    h.graph = std::move(g);
    for (const char* n : {"n1", "n2", "n3", "n4", "n5"}) {
        h.flow[n] = Value::of_nat(1);
        h.inflow[n] = Value::of_nat(n == std::string("n1") ? 1 : 0);
    }
    return h;
}

} // namespace detail

/// Unit-flow chain n1 -> n3 -> n5 -> n4 -> n2.
inline FlowGraph swap_before_graph() {
    return detail::chain_five({{"n1", "n3"}, {"n3", "n5"}, {"n5", "n4"}, {"n4", "n2"}});
}

/// The rewrite ships n3's edge to n2 and closes n4 and n5 into a cycle.
/// Region {n3, n4} keeps its interface, yet the whole graph stops being
/// effectively acyclic and its flow equation gains extra solutions.
inline FlowGraph swap_after_graph() {
    return detail::chain_five({{"n1", "n3"}, {"n3", "n2"}, {"n4", "n5"}, {"n5", "n4"}});
}

} // namespace flow::fixtures
