#include "flow/value.hpp"

#include <algorithm>

namespace flow {

namespace {

template <typename K>
void drop_zero_counts(std::map<K, Nat>& m) {
    for (auto it = m.begin(); it != m.end();) {
        if (it->second == 0)
            it = m.erase(it);
        else
            ++it;
    }
}

template <typename K>
std::map<K, Nat> union_counts(const std::map<K, Nat>& a, const std::map<K, Nat>& b) {
    std::map<K, Nat> out = a;
    for (const auto& [k, c] : b) out[k] += c;
    return out;
}

template <typename K>
std::optional<std::map<K, Nat>> subtract_counts(const std::map<K, Nat>& a,
                                                const std::map<K, Nat>& b) {
    std::map<K, Nat> out = a;
    for (const auto& [k, c] : b) {
        auto it = out.find(k);
        if (it == out.end() || it->second < c) return std::nullopt;
        it->second -= c;
        if (it->second == 0) out.erase(it);
    }
    return out;
}

} // namespace

Value Value::of_nat(Nat n) {
    Value v;
    v.kind = ValueKind::Nat;
    v.nat = n;
    return v;
}

Value Value::of_vec(std::vector<Nat> vec) {
    Value v;
    v.kind = ValueKind::NatVec;
    v.vec = std::move(vec);
    return v;
}

Value Value::of_multiset(std::initializer_list<Nat> elems) {
    Value v;
    v.kind = ValueKind::MultisetNat;
    for (Nat e : elems) v.ms_nat[e]++;
    return v;
}

Value Value::of_multiset_counts(std::map<Nat, Nat> counts) {
    Value v;
    v.kind = ValueKind::MultisetNat;
    v.ms_nat = std::move(counts);
    drop_zero_counts(v.ms_nat);
    return v;
}

Value Value::of_cost_multiset(std::map<Cost, Nat> counts) {
    Value v;
    v.kind = ValueKind::MultisetCost;
    v.ms_cost = std::move(counts);
    drop_zero_counts(v.ms_cost);
    return v;
}

Value Value::of_set_multiset(std::map<std::set<NodeId>, Nat> counts) {
    Value v;
    v.kind = ValueKind::MultisetNodeSet;
    v.ms_sets = std::move(counts);
    drop_zero_counts(v.ms_sets);
    return v;
}

bool Value::is_zero() const {
    switch (kind) {
    case ValueKind::Nat: return nat == 0;
    case ValueKind::NatVec:
        return std::all_of(vec.begin(), vec.end(), [](Nat n) { return n == 0; });
    case ValueKind::MultisetNat: return ms_nat.empty();
    case ValueKind::MultisetCost: return ms_cost.empty();
    case ValueKind::MultisetNodeSet: return ms_sets.empty();
    }
    return true;
}

bool operator<(const Value& a, const Value& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    switch (a.kind) {
    case ValueKind::Nat: return a.nat < b.nat;
    case ValueKind::NatVec: return a.vec < b.vec;
    case ValueKind::MultisetNat: return a.ms_nat < b.ms_nat;
    case ValueKind::MultisetCost: return a.ms_cost < b.ms_cost;
    case ValueKind::MultisetNodeSet: return a.ms_sets < b.ms_sets;
    }
    return false;
}

static void require_same_shape(const Value& a, const Value& b, const char* op) {
    if (a.kind != b.kind)
        throw InputError(std::string(op) + ": mismatched value kinds " +
                         value_kind_name(a.kind) + " vs " + value_kind_name(b.kind));
    if (a.kind == ValueKind::NatVec && a.vec.size() != b.vec.size())
        throw InputError(std::string(op) + ": mismatched tuple arity");
}

Value monoid_add(const Value& a, const Value& b) {
    require_same_shape(a, b, "monoid_add");
    Value out = a;
    switch (a.kind) {
    case ValueKind::Nat:
        out.nat = a.nat + b.nat;
        break;
    case ValueKind::NatVec:
        for (size_t i = 0; i < out.vec.size(); ++i) out.vec[i] += b.vec[i];
        break;
    case ValueKind::MultisetNat:
        out.ms_nat = union_counts(a.ms_nat, b.ms_nat);
        break;
    case ValueKind::MultisetCost:
        out.ms_cost = union_counts(a.ms_cost, b.ms_cost);
        break;
    case ValueKind::MultisetNodeSet:
        out.ms_sets = union_counts(a.ms_sets, b.ms_sets);
        break;
    }
    return out;
}

std::optional<Value> monoid_subtract(const Value& a, const Value& b) {
    require_same_shape(a, b, "monoid_subtract");
    Value out = a;
    switch (a.kind) {
    case ValueKind::Nat:
        if (a.nat < b.nat) return std::nullopt;
        out.nat = a.nat - b.nat;
        return out;
    case ValueKind::NatVec:
        for (size_t i = 0; i < out.vec.size(); ++i) {
            if (a.vec[i] < b.vec[i]) return std::nullopt;
            out.vec[i] = a.vec[i] - b.vec[i];
        }
        return out;
    case ValueKind::MultisetNat: {
        auto r = subtract_counts(a.ms_nat, b.ms_nat);
        if (!r) return std::nullopt;
        out.ms_nat = std::move(*r);
        return out;
    }
    case ValueKind::MultisetCost: {
        auto r = subtract_counts(a.ms_cost, b.ms_cost);
        if (!r) return std::nullopt;
        out.ms_cost = std::move(*r);
        return out;
    }
    case ValueKind::MultisetNodeSet: {
        auto r = subtract_counts(a.ms_sets, b.ms_sets);
        if (!r) return std::nullopt;
        out.ms_sets = std::move(*r);
        return out;
    }
    }
    return std::nullopt;
}

bool monoid_leq(const Value& a, const Value& b) {
    return monoid_subtract(b, a).has_value();
}

std::string value_kind_name(ValueKind k) {
    switch (k) {
    case ValueKind::Nat: return "nat";
    case ValueKind::NatVec: return "nat_vec";
    case ValueKind::MultisetNat: return "multiset_nat";
    case ValueKind::MultisetCost: return "multiset_cost";
    case ValueKind::MultisetNodeSet: return "multiset_node_set";
    }
    return "unknown";
}

} // namespace flow
