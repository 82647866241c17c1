#include "flow/value.hpp"

#include <doctest.h>

using namespace flow;

TEST_CASE("nat values add and subtract") {
    Value a = Value::of_nat(3), b = Value::of_nat(5);
    CHECK(monoid_add(a, b) == Value::of_nat(8));
    CHECK(monoid_subtract(b, a) == Value::of_nat(2));
    CHECK(!monoid_subtract(a, b).has_value());
    CHECK(monoid_leq(a, b));
    CHECK(!monoid_leq(b, a));
    CHECK(Value::of_nat(0).is_zero());
    CHECK(!a.is_zero());
}

TEST_CASE("vector values operate componentwise") {
    Value a = Value::of_vec({1, 4}), b = Value::of_vec({2, 0});
    CHECK(monoid_add(a, b) == Value::of_vec({3, 4}));
    CHECK(!monoid_subtract(a, b).has_value());
    CHECK(monoid_subtract(monoid_add(a, b), b) == a);
    CHECK(monoid_leq(b, monoid_add(a, b)));
    CHECK(!monoid_leq(a, b));
    CHECK(Value::of_vec({0, 0}).is_zero());
}

TEST_CASE("multisets are kept canonical and subtract by counts") {
    Value m = Value::of_multiset({1, 2, 2});
    CHECK(m.ms_nat.at(2) == 2);
    Value one = Value::of_multiset({2});
    Value rest = *monoid_subtract(m, one);
    CHECK(rest == Value::of_multiset({1, 2}));
    CHECK(*monoid_subtract(rest, Value::of_multiset({1, 2})) == Value::of_multiset({}));
    CHECK(!monoid_subtract(rest, Value::of_multiset({3})).has_value());
    CHECK(Value::of_multiset({}).is_zero());
    CHECK(Value::of_multiset_counts({{4, 0}}) == Value::of_multiset({}));
}

TEST_CASE("cost ordering puts infinity on top and plus saturates") {
    CHECK(Cost::of(3) < Cost::of(7));
    CHECK(Cost::of(7) < Cost::infinity());
    CHECK(Cost::of(3).plus(Cost::of(4)) == Cost::of(7));
    CHECK(Cost::of(3).plus(Cost::infinity()) == Cost::infinity());
    CHECK(Cost::infinity().plus(Cost::infinity()) == Cost::infinity());
}

TEST_CASE("cost multisets and node-set multisets are monoids too") {
    Value c1 = Value::of_cost_multiset({{Cost::of(2), 1}});
    Value c2 = Value::of_cost_multiset({{Cost::of(2), 1}, {Cost::infinity(), 2}});
    CHECK(monoid_add(c1, c1).ms_cost.at(Cost::of(2)) == 2);
    CHECK(monoid_subtract(c2, c1) == Value::of_cost_multiset({{Cost::infinity(), 2}}));

    Value s1 = Value::of_set_multiset({{{"a"}, 1}});
    Value s2 = Value::of_set_multiset({{{"a"}, 1}, {{"a", "b"}, 1}});
    CHECK(monoid_leq(s1, s2));
    CHECK(monoid_subtract(s2, s1) == Value::of_set_multiset({{{"a", "b"}, 1}}));
    CHECK(!monoid_subtract(s1, s2).has_value());
}

TEST_CASE("mixed-kind arithmetic is an input error") {
    CHECK_THROWS_AS(monoid_add(Value::of_nat(1), Value::of_vec({1})), InputError);
}
