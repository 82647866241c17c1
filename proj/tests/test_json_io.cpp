#include "fixtures.hpp"
#include "flow/json_io.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>

using namespace flow;

TEST_CASE("values of every kind survive a JSON round trip") {
    struct Case {
        Domain d;
        Value v;
    };
    std::vector<Case> cases = {
        {Domain::path_count(), Value::of_nat(7)},
        {make_product_domain(Domain::path_count(), Domain::path_count()),
         Value::of_vec({0, 3})},
        {Domain::pip(), Value::of_multiset({1, 2, 2})},
        {Domain::shortest_path(),
         Value::of_cost_multiset({{Cost::of(4), 2}, {Cost::infinity(), 1}})},
        {Domain::inverse_reach(), Value::of_set_multiset({{{}, 1}, {{"a", "b"}, 2}})},
    };
    for (const auto& c : cases) {
        CAPTURE(c.d.name());
        Json j = value_to_json(c.v);
        CHECK(value_from_json(c.d, j, "t") == c.v);
    }
}

TEST_CASE("value decoding is strict") {
    Domain pip = Domain::pip();
    CHECK_THROWS_AS(value_from_json(pip, Json{{"2", 0}}, "t"), InputError);   // zero count
    CHECK_THROWS_AS(value_from_json(pip, Json{{"x", 1}}, "t"), InputError);   // bad element
    CHECK_THROWS_AS(value_from_json(pip, Json(3), "t"), InputError);          // wrong shape
    CHECK_THROWS_AS(value_from_json(Domain::path_count(), Json(-1), "t"), InputError);

    Domain ir = Domain::inverse_reach();
    Json entry = {{"set", {"a", "a"}}, {"count", 1}};
    CHECK_THROWS_AS(value_from_json(ir, Json::array({entry}), "t"), InputError);
    Json extra = {{"set", Json::array()}, {"count", 1}, {"weight", 2}};
    CHECK_THROWS_AS(value_from_json(ir, Json::array({extra}), "t"), InputError);

    Domain prod = make_product_domain(Domain::path_count(), Domain::path_count());
    CHECK_THROWS_AS(value_from_json(prod, Json::array({1}), "t"), InputError); // arity
}

TEST_CASE("domains and edge functions round trip") {
    for (const Domain& d :
         {Domain::path_count(), Domain::pip(), Domain::shortest_path(), Domain::inverse_reach(),
          make_product_domain(make_product_domain(Domain::path_count(), Domain::path_count()),
                              Domain::path_count())}) {
        CHECK(domain_from_json(domain_to_json(d)) == d);
    }
    CHECK_THROWS_AS(domain_from_json(Json{{"kind", "path_count"}, {"arity", 2}}), InputError);
    CHECK_THROWS_AS(domain_from_json(Json{{"kind", "product"}, {"arity", 1}}), InputError);

    for (const EdgeFunction& e :
         {EdgeFunction::zero(), EdgeFunction::identity(), EdgeFunction::scale_vec({2, 0}),
          EdgeFunction::max_with(3), EdgeFunction::add_min_with(Cost::of(5)),
          EdgeFunction::add_min_with(Cost::infinity()), EdgeFunction::path_filter("n1")}) {
        CHECK(edge_from_json(edge_to_json(e)) == e);
    }
    CHECK_THROWS_AS(edge_from_json(Json{{"kind", "identity"}, {"scale", {1}}}), InputError);
    CHECK_THROWS_AS(edge_from_json(Json{{"kind", "warp"}}), InputError);
}

TEST_CASE("graph files round trip and reject malformed input") {
    FlowGraph h = fixtures::swap_before_graph();
    GraphFile f{h.graph, h.inflow, h.flow};
    Json j = graph_file_to_json(f);
    GraphFile back = graph_file_from_json(j);
    CHECK(back.graph == f.graph);
    CHECK(back.inflow == f.inflow);
    CHECK(back.flow == f.flow);

    Json no_flow = j;
    no_flow.erase("flow");
    CHECK(!graph_file_from_json(no_flow).flow.has_value());

    Json dup = j;
    dup["nodes"].push_back("n1");
    CHECK_THROWS_AS(graph_file_from_json(dup), InputError);

    Json badsrc = j;
    badsrc["edges"].push_back(Json{{"from", "zz"}, {"to", "n1"}, {"fn", {{"kind", "identity"}}}});
    CHECK_THROWS_AS(graph_file_from_json(badsrc), InputError);

    Json wrongfn = j;
    wrongfn["edges"][0]["fn"] = Json{{"kind", "max_with"}, {"max_with", 2}};
    CHECK_THROWS_AS(graph_file_from_json(wrongfn), InputError);

    Json unknown = j;
    unknown["color"] = "red";
    CHECK_THROWS_AS(graph_file_from_json(unknown), InputError);
}

TEST_CASE("interfaces round trip with zero-inflow entries implied") {
    Interface i = interface_of(restrict_flow_graph(fixtures::swap_before_graph(), {"n3", "n4"}));
    Interface back = interface_from_json(interface_to_json(i));
    CHECK(back == i);

    Json j = interface_to_json(i);
    j["out"]["n3"] = 1; // inside the domain
    CHECK_THROWS_AS(interface_from_json(j), InputError);
    Json j2 = interface_to_json(i);
    j2["out"]["n7"] = 0; // zero entries are not canonical
    CHECK_THROWS_AS(interface_from_json(j2), InputError);
}

TEST_CASE("dumps are canonical and files round trip on disk") {
    Json j = graph_file_to_json(
        {fixtures::swap_before_graph().graph, fixtures::swap_before_graph().inflow, {}});
    std::string once = dump_json(j);
    CHECK(once == dump_json(j));
    CHECK(once.back() == '\n');

    std::filesystem::path p =
        std::filesystem::temp_directory_path() / "flow_json_io_roundtrip.json";
    save_json_file(p.string(), j);
    CHECK(load_json_file(p.string()) == j);
    std::filesystem::remove(p);
    CHECK_THROWS_AS(load_json_file(p.string()), InputError);
}
