#pragma once

#include "flow/base.hpp"

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace flow {

/// Edge cost for shortest-path values: a natural number or infinity.
/// Addition saturates at infinity.
struct Cost {
    bool inf = false;
    Nat finite = 0;

    static Cost of(Nat n) { return Cost{false, n}; }
    static Cost infinity() { return Cost{true, 0}; }

    friend auto operator<=>(const Cost& a, const Cost& b) {
        // Infinity sorts above every finite cost.
        if (a.inf != b.inf) return a.inf <=> b.inf;
        return a.finite <=> b.finite;
    }
    friend bool operator==(const Cost&, const Cost&) = default;

    Cost plus(const Cost& o) const {
        if (inf || o.inf) return infinity();
        return of(finite + o.finite);
    }
};

enum class ValueKind {
    Nat,            // non-negative integer
    NatVec,         // fixed-arity tuple of non-negative integers
    MultisetNat,    // multiset of non-negative integers
    MultisetCost,   // multiset of costs (naturals + infinity)
    MultisetNodeSet // multiset of finite node-id sets
};

/// A monoid element. The active representation is selected by `kind`;
/// inactive fields stay default-constructed so equality can compare all.
/// Multisets are kept canonical: no zero counts.
struct Value {
    ValueKind kind = ValueKind::Nat;
    Nat nat = 0;
    std::vector<Nat> vec;
    std::map<Nat, Nat> ms_nat;
    std::map<Cost, Nat> ms_cost;
    std::map<std::set<NodeId>, Nat> ms_sets;

    static Value of_nat(Nat n);
    static Value of_vec(std::vector<Nat> v);
    static Value of_multiset(std::initializer_list<Nat> elems);
    static Value of_multiset_counts(std::map<Nat, Nat> counts);
    static Value of_cost_multiset(std::map<Cost, Nat> counts);
    static Value of_set_multiset(std::map<std::set<NodeId>, Nat> counts);

    bool is_zero() const;

    friend bool operator==(const Value&, const Value&) = default;
    friend bool operator<(const Value& a, const Value& b);
};

/// m1 + m2. The operands must have the same kind (and arity for tuples);
/// otherwise InputError.
Value monoid_add(const Value& a, const Value& b);

/// The unique m with b + m = a, if it exists. Nullopt means "undefined"
/// (total cancellative monoids do not always have differences).
std::optional<Value> monoid_subtract(const Value& a, const Value& b);

/// Partial order m1 <= m2 iff some m3 has m1 + m3 = m2.
bool monoid_leq(const Value& a, const Value& b);

std::string value_kind_name(ValueKind k);

} // namespace flow
