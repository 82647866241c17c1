#pragma once

#include "flow/domain.hpp"

#include <string>
#include <vector>

namespace flow {

enum class EdgeKind { Zero, Identity, ScaleVec, MaxWith, AddMinWith, PathFilter };

/// An edge function drawn from a domain's admitted family.
///
///   Zero           constant zero (every domain)
///   Identity       m -> m (path_count, product)
///   ScaleVec(c)    componentwise multiply by c (path_count, product)
///   MaxWith(p)     M -> {max(M ∪ {p})} (pip)
///   AddMinWith(c)  S -> {c + min(S)}, saturating at infinity (shortest_path)
///   PathFilter(n)  keeps entries whose set misses n, adding n (inverse_reach)
struct EdgeFunction {
    EdgeKind kind = EdgeKind::Zero;
    std::vector<Nat> coeffs; // ScaleVec
    Nat prio = 0;            // MaxWith
    Cost cost;               // AddMinWith
    NodeId node;             // PathFilter

    static EdgeFunction zero();
    static EdgeFunction identity();
    static EdgeFunction scale_vec(std::vector<Nat> coeffs);
    static EdgeFunction max_with(Nat p);
    static EdgeFunction add_min_with(Cost c);
    static EdgeFunction path_filter(NodeId n);

    bool is_zero() const { return kind == EdgeKind::Zero; }

    friend bool operator==(const EdgeFunction&, const EdgeFunction&) = default;
};

/// Apply e to v. Total: AddMinWith takes min over the empty multiset to be
/// infinity, so it yields {infinity} there.
Value edge_eval(const Domain& d, const EdgeFunction& e, const Value& v);

/// Symbolic composition: edge_compose(e1, e2) applies e2 first, so
/// edge_eval(compose(e1,e2), m) == edge_eval(e1, edge_eval(e2, m)).
/// Closed only for the zero/identity/scale family plus the special
/// PathFilter(n) ∘ PathFilter(n) = Zero case; otherwise CapabilityError.
EdgeFunction edge_compose(const Domain& d, const EdgeFunction& e1, const EdgeFunction& e2);

/// Symbolic pointwise sum; closed for the zero/identity/scale family.
EdgeFunction edge_add(const Domain& d, const EdgeFunction& e1, const EdgeFunction& e2);

/// True if e belongs to d's admitted edge family.
bool edge_admitted(const Domain& d, const EdgeFunction& e);

/// Coefficient vector of a zero/identity/scale edge at the domain's arity;
/// CapabilityError for edge kinds with no coefficient form.
std::vector<Nat> as_coeffs(const Domain& d, const EdgeFunction& e);

std::string edge_kind_name(EdgeKind k);

} // namespace flow
