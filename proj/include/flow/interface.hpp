#pragma once

#include "flow/graph.hpp"

#include <optional>

namespace flow {

/// The flow interface of a region: the inflow it requires at each of its
/// nodes and the outflow it sends to each node outside. `in` is total on
/// `dom` (zero entries kept); `out` keeps only nonzero entries, so equality
/// is structural on the canonical form.
struct Interface {
    Domain domain;
    std::set<NodeId> dom;
    FlowAssignment in;
    FlowAssignment out;

    friend bool operator==(const Interface&, const Interface&) = default;
};

Interface interface_of(const FlowGraph& h);

/// The empty interface (identity of composition).
Interface identity_interface(const Domain& d);

bool is_identity_interface(const Interface& i);

/// Composition: defined iff the domains are disjoint, every boundary
/// requirement matches (each side's inflow covers what the other sends in:
/// in1(n) = in(n) + out2(n), solved for in(n) by subtraction), and the
/// outside outflows add. Nullopt when undefined.
std::optional<Interface> interface_compose(const Interface& i1, const Interface& i2);

struct AlgebraLawReport {
    bool ok = true;
    int cases = 0;
    std::vector<std::string> failures;
};

/// Randomized separation-algebra suite over interfaces of region
/// decompositions plus synthetic perturbations: commutativity,
/// associativity with definedness agreement, identity, cancellativity.
AlgebraLawReport check_separation_algebra_laws(const Domain& d, std::uint64_t seed, int cases);

/// Randomized congruence suite: for random decompositions H = H1 ⊙ H2 the
/// interface of the composite equals I1 ⊕ I2, including definedness
/// agreement on non-composing pairs.
AlgebraLawReport check_congruence(const Domain& d, std::uint64_t seed, int cases);

} // namespace flow
