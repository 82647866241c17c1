#pragma once

#include "flow/value.hpp"

#include <optional>
#include <string>
#include <vector>

namespace flow {

enum class DomainKind { PathCount, Pip, ShortestPath, InverseReach, Product };

/// A flow domain: a commutative, cancellative, total monoid of values plus
/// the family of edge functions admitted on graph edges. The built-in
/// catalogue:
///
///   path_count     naturals under +            edges: zero, identity, scale
///   pip            multisets of priorities     edges: zero, max_with(p)
///   shortest_path  multisets of costs          edges: zero, add_min_with(c)
///   inverse_reach  multisets of node sets      edges: zero, path_filter(n)
///   product        tuples, componentwise +     edges: zero, identity, scale
///
/// Capability flags gate the symbolic algorithms: `endomorphic` (edges
/// distribute over +), `nilpotent_degree` (every edge function vanishes at
/// that power), `reduced` (e∘e = 0 implies e = 0), `downset_enumerable`
/// (the set {m' : m' <= m} is finite and enumerable).
struct Domain {
    DomainKind kind = DomainKind::PathCount;
    int arity = 1; // tuple width; 1 for scalar domains
    bool endomorphic = false;
    bool reduced = false;
    bool downset_enumerable = false;
    std::optional<int> nilpotent_degree;

    static Domain path_count();
    static Domain pip();
    static Domain shortest_path();
    static Domain inverse_reach();

    ValueKind value_kind() const;
    Value zero() const;
    std::string name() const;

    friend bool operator==(const Domain&, const Domain&) = default;
};

/// Componentwise product of two ScaleVec-capable domains (path_count or an
/// existing product). Other combinations raise CapabilityError.
Domain make_product_domain(const Domain& a, const Domain& b);

/// Raise InputError unless v is a well-formed element of d.
void require_value(const Domain& d, const Value& v, const std::string& where);

struct LawFailure {
    std::string law;     // which law broke
    std::string witness; // rendered counterexample
};

struct LawReport {
    bool ok = true;
    int cases = 0;
    std::vector<LawFailure> failures;
};

/// Randomized monoid-law suite over d's value space: commutativity,
/// associativity, zero identity, cancellativity (triple probe plus
/// subtract round-trip), positivity.
LawReport check_monoid_laws(const Domain& d, std::uint64_t seed, int cases);

} // namespace flow
