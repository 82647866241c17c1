#include "fixtures.hpp"
#include "generators.hpp"

#include <doctest.h>

using namespace flow;

TEST_CASE("a region interface records required inflow and sent outflow") {
    FlowGraph region = restrict_flow_graph(fixtures::swap_before_graph(), {"n3", "n4"});
    Interface i = interface_of(region);
    CHECK(i.dom == std::set<NodeId>{"n3", "n4"});
    CHECK(i.in == FlowAssignment{{"n3", Value::of_nat(1)}, {"n4", Value::of_nat(1)}});
    CHECK(i.out == FlowAssignment{{"n2", Value::of_nat(1)}, {"n5", Value::of_nat(1)}});

    // The rewritten region needs the same interface even though its internal
    // edges changed completely.
    FlowGraph region2 = restrict_flow_graph(fixtures::swap_after_graph(), {"n3", "n4"});
    CHECK(interface_of(region2) == i);
}

TEST_CASE("a lone process advertises only its default priority") {
    FlowGraph h = pip_flow_graph(fixtures::pip_example_state());
    Interface i = interface_of(singleton_flow_graph(h, "p7"));
    CHECK(i.dom == std::set<NodeId>{"p7"});
    CHECK(i.in == FlowAssignment{{"p7", Value::of_multiset({})}});
    CHECK(i.out == FlowAssignment{{"r4", Value::of_multiset({2})}});

    // The whole state is closed: every inflow empty, nothing leaves.
    CHECK(pip_phi(interface_of(h)));
}

TEST_CASE("the identity interface composes as a unit") {
    Interface id = identity_interface(Domain::path_count());
    CHECK(is_identity_interface(id));
    Interface i = interface_of(restrict_flow_graph(fixtures::swap_before_graph(), {"n3"}));
    CHECK(!is_identity_interface(i));
    CHECK(interface_compose(i, id) == i);
    CHECK(interface_compose(id, i) == i);
}

TEST_CASE("interfaces of complementary regions compose to the whole") {
    FlowGraph h = fixtures::swap_before_graph();
    FlowGraph hl = restrict_flow_graph(h, {"n1", "n3"});
    FlowGraph hr = restrict_flow_graph(h, {"n2", "n4", "n5"});
    auto sum = interface_compose(interface_of(hl), interface_of(hr));
    REQUIRE(sum.has_value());
    CHECK(*sum == interface_of(h));
    CHECK(sum->out.empty());
    CHECK(sum->in.at("n1") == Value::of_nat(1));
    CHECK(sum->in.at("n2") == Value::of_nat(0));
}

TEST_CASE("composition is undefined on overlap or uncovered boundary flow") {
    Interface a{Domain::path_count(), {"a"}, {{"a", Value::of_nat(0)}}, {}};
    Interface b{Domain::path_count(),
                {"b"},
                {{"b", Value::of_nat(1)}},
                {{"a", Value::of_nat(1)}}};
    // b sends 1 into a, but a's interface demands inflow 0: no subtraction.
    CHECK(interface_compose(a, b) == std::nullopt);

    Interface a2 = a;
    a2.in["a"] = Value::of_nat(1);
    auto ok = interface_compose(a2, b);
    REQUIRE(ok.has_value());
    CHECK(ok->in == FlowAssignment{{"a", Value::of_nat(0)}, {"b", Value::of_nat(1)}});
    CHECK(ok->out.empty());

    CHECK(interface_compose(a2, a2) == std::nullopt); // overlapping domains
}

TEST_CASE("separation algebra laws hold across the built-in domains") {
    for (const Domain& d :
         {Domain::path_count(), Domain::pip(), Domain::shortest_path(), Domain::inverse_reach(),
          make_product_domain(Domain::path_count(), Domain::path_count())}) {
        CAPTURE(d.name());
        AlgebraLawReport rep = check_separation_algebra_laws(d, 11, 120);
        CHECK(rep.ok);
        CHECK(rep.failures.empty());
        CHECK(rep.cases == 120);
    }
}

TEST_CASE("interface composition is a congruence for graph composition") {
    for (const Domain& d :
         {Domain::path_count(), Domain::pip(), Domain::shortest_path(), Domain::inverse_reach(),
          make_product_domain(Domain::path_count(), Domain::path_count())}) {
        CAPTURE(d.name());
        AlgebraLawReport rep = check_congruence(d, 12, 120);
        CHECK(rep.ok);
        CHECK(rep.failures.empty());
    }
}
