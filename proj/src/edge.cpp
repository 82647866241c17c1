#include "flow/edge.hpp"

#include <algorithm>

namespace flow {

EdgeFunction EdgeFunction::zero() { return EdgeFunction{}; }

EdgeFunction EdgeFunction::identity() {
    EdgeFunction e;
    e.kind = EdgeKind::Identity;
    return e;
}

EdgeFunction EdgeFunction::scale_vec(std::vector<Nat> coeffs) {
    EdgeFunction e;
    e.kind = EdgeKind::ScaleVec;
    e.coeffs = std::move(coeffs);
    return e;
}

EdgeFunction EdgeFunction::max_with(Nat p) {
    EdgeFunction e;
    e.kind = EdgeKind::MaxWith;
    e.prio = p;
    return e;
}

EdgeFunction EdgeFunction::add_min_with(Cost c) {
    EdgeFunction e;
    e.kind = EdgeKind::AddMinWith;
    e.cost = c;
    return e;
}

EdgeFunction EdgeFunction::path_filter(NodeId n) {
    EdgeFunction e;
    e.kind = EdgeKind::PathFilter;
    e.node = std::move(n);
    return e;
}

bool edge_admitted(const Domain& d, const EdgeFunction& e) {
    if (e.kind == EdgeKind::Zero) return true;
    switch (d.kind) {
    case DomainKind::PathCount:
    case DomainKind::Product:
        if (e.kind == EdgeKind::Identity) return true;
        if (e.kind == EdgeKind::ScaleVec)
            return e.coeffs.size() == static_cast<size_t>(d.arity);
        return false;
    case DomainKind::Pip: return e.kind == EdgeKind::MaxWith;
    case DomainKind::ShortestPath: return e.kind == EdgeKind::AddMinWith;
    case DomainKind::InverseReach: return e.kind == EdgeKind::PathFilter;
    }
    return false;
}

std::vector<Nat> as_coeffs(const Domain& d, const EdgeFunction& e) {
    size_t k = static_cast<size_t>(d.arity);
    switch (e.kind) {
    case EdgeKind::Zero: return std::vector<Nat>(k, 0);
    case EdgeKind::Identity: return std::vector<Nat>(k, 1);
    case EdgeKind::ScaleVec: return e.coeffs;
    default:
        throw CapabilityError("edge function " + edge_kind_name(e.kind) +
                              " has no coefficient form");
    }
}

// Collapse all-zero to Zero and all-one to Identity so symbolic results
// compare canonically.
static EdgeFunction from_coeffs(std::vector<Nat> c) {
    if (std::all_of(c.begin(), c.end(), [](Nat n) { return n == 0; }))
        return EdgeFunction::zero();
    if (std::all_of(c.begin(), c.end(), [](Nat n) { return n == 1; }))
        return EdgeFunction::identity();
    return EdgeFunction::scale_vec(std::move(c));
}

Value edge_eval(const Domain& d, const EdgeFunction& e, const Value& v) {
    require_value(d, v, "edge_eval");
    if (!edge_admitted(d, e))
        throw InputError("edge_eval: " + edge_kind_name(e.kind) +
                         " is not admitted by domain " + d.name());
    switch (e.kind) {
    case EdgeKind::Zero:
        return d.zero();
    case EdgeKind::Identity:
        return v;
    case EdgeKind::ScaleVec: {
        Value out = v;
        if (d.kind == DomainKind::PathCount) {
            out.nat = v.nat * e.coeffs[0];
        } else {
            for (size_t i = 0; i < out.vec.size(); ++i) out.vec[i] = v.vec[i] * e.coeffs[i];
        }
        return out;
    }
    case EdgeKind::MaxWith: {
        // M -> {max(M ∪ {p})}; total because p is always present.
        Nat m = e.prio;
        if (!v.ms_nat.empty()) m = std::max(m, v.ms_nat.rbegin()->first);
        return Value::of_multiset({m});
    }
    case EdgeKind::AddMinWith: {
        // M -> {min(M) + c}; min over the empty multiset is infinity.
        Cost m = v.ms_cost.empty() ? Cost::infinity() : v.ms_cost.begin()->first;
        return Value::of_cost_multiset({{m.plus(e.cost), 1}});
    }
    case EdgeKind::PathFilter: {
        // Entries whose set already contains the filter node vanish; the
        // rest gain it. Linear over multiset union, and applying the same
        // filter twice yields zero.
        std::map<std::set<NodeId>, Nat> out;
        for (const auto& [s, c] : v.ms_sets) {
            if (s.count(e.node)) continue;
            std::set<NodeId> grown = s;
            grown.insert(e.node);
            out[grown] += c;
        }
        return Value::of_set_multiset(std::move(out));
    }
    }
    return d.zero();
}

EdgeFunction edge_compose(const Domain& d, const EdgeFunction& e1, const EdgeFunction& e2) {
    if (!edge_admitted(d, e1) || !edge_admitted(d, e2))
        throw InputError("edge_compose: edge function not admitted by domain " + d.name());
    // Nilpotency: the same path filter applied twice erases everything.
    if (e1.kind == EdgeKind::PathFilter && e2.kind == EdgeKind::PathFilter) {
        if (e1.node == e2.node) return EdgeFunction::zero();
        throw CapabilityError("edge_compose: path_filter composition over distinct nodes "
                              "is not representable");
    }
    if (e1.kind == EdgeKind::Zero) return EdgeFunction::zero();
    if (e1.kind == EdgeKind::Identity) return e2;
    if (e2.kind == EdgeKind::Identity) return e1;
    if (e2.kind == EdgeKind::Zero) {
        // e1(0) = 0 only holds for endomorphic families.
        if (e1.kind == EdgeKind::ScaleVec || e1.kind == EdgeKind::PathFilter)
            return EdgeFunction::zero();
        throw CapabilityError("edge_compose: " + edge_kind_name(e1.kind) +
                              " composed with zero is not representable");
    }
    if (e1.kind == EdgeKind::ScaleVec && e2.kind == EdgeKind::ScaleVec) {
        std::vector<Nat> c = as_coeffs(d, e1);
        std::vector<Nat> c2 = as_coeffs(d, e2);
        for (size_t i = 0; i < c.size(); ++i) c[i] *= c2[i];
        return from_coeffs(std::move(c));
    }
    throw CapabilityError("edge_compose: no symbolic composition for " +
                          edge_kind_name(e1.kind) + " ∘ " + edge_kind_name(e2.kind));
}

EdgeFunction edge_add(const Domain& d, const EdgeFunction& e1, const EdgeFunction& e2) {
    if (!edge_admitted(d, e1) || !edge_admitted(d, e2))
        throw InputError("edge_add: edge function not admitted by domain " + d.name());
    if (e1.kind == EdgeKind::Zero) return e2;
    if (e2.kind == EdgeKind::Zero) return e1;
    bool scalable1 = e1.kind == EdgeKind::Identity || e1.kind == EdgeKind::ScaleVec;
    bool scalable2 = e2.kind == EdgeKind::Identity || e2.kind == EdgeKind::ScaleVec;
    if (scalable1 && scalable2) {
        std::vector<Nat> c = as_coeffs(d, e1);
        std::vector<Nat> c2 = as_coeffs(d, e2);
        for (size_t i = 0; i < c.size(); ++i) c[i] += c2[i];
        return from_coeffs(std::move(c));
    }
    throw CapabilityError("edge_add: no symbolic sum for " + edge_kind_name(e1.kind) +
                          " + " + edge_kind_name(e2.kind));
}

std::string edge_kind_name(EdgeKind k) {
    switch (k) {
    case EdgeKind::Zero: return "zero";
    case EdgeKind::Identity: return "identity";
    case EdgeKind::ScaleVec: return "scale";
    case EdgeKind::MaxWith: return "max_with";
    case EdgeKind::AddMinWith: return "add_min_with";
    case EdgeKind::PathFilter: return "path_filter";
    }
    return "unknown";
}

} // namespace flow
