#pragma once

#include "flow/extension.hpp"
#include "flow/json_io.hpp"

namespace flow {

enum class PipKind { Process, Resource };

/// One node of the priority-inheritance state: a process or a resource.
/// `next` is the waiting/holding pointer (process -> resource it waits on,
/// resource -> process holding it); `prios` is the multiset of inherited
/// priority contributions.
struct PipNode {
    std::optional<NodeId> next;
    Nat curr_prio = 0;
    Nat def_prio = 0;
    Value prios = Value::of_multiset({});

    friend bool operator==(const PipNode&, const PipNode&) = default;
};

struct PipState {
    std::map<NodeId, PipNode> nodes;
    std::map<NodeId, PipKind> kinds; // used by the scenario generator only

    friend bool operator==(const PipState&, const PipState&) = default;
};

/// Flow abstraction: pip-domain graph with edge (x, next(x)) labelled
/// MaxWith(def_prio(x)), candidate flow = stored prios.
std::pair<Graph, FlowAssignment> pip_abstract(const PipState& s);

/// Abstract and validate; InputError if the stored prios admit no inflow.
FlowGraph pip_flow_graph(const PipState& s);

/// Node-local invariant: curr_prio = max(prios ∪ {def_prio}), next is not
/// the node itself, and prios matches the flow equation at the node under
/// empty inflow.
bool pip_gamma(const PipState& s, const NodeId& n);

/// Global condition: the interface is closed (empty inflow everywhere, no
/// outflow).
bool pip_phi(const Interface& i);

/// Priority propagation along next pointers: swap `from` for `to` in the
/// prios multiset, recompute curr, follow next while curr changed. from/to
/// use -1 for "no priority". Step budget 4·|nodes|; exceeding it is a
/// ModelError.
PipState pip_update(PipState s, const NodeId& n, long long from, long long to);

/// acquire(p, r): free resource is granted (r.next := p), held resource
/// makes p wait (p.next := r) and pushes p's priority into the chain.
/// Precondition: p ≠ r, next(p) = null.
PipState pip_acquire(PipState s, const NodeId& p, const NodeId& r);

/// release(p, r): requires next(r) = p; clears r.next and withdraws r's
/// priority contribution from p.
PipState pip_release(PipState s, const NodeId& p, const NodeId& r);

struct PipOp {
    bool acquire = true;
    NodeId p;
    NodeId r;
};

struct PipStepRecord {
    int step = 0;
    PipOp op;
    std::set<NodeId> footprint;
    std::uint64_t interface_hash = 0;
};

struct PipRunReport {
    bool ok = true;
    std::string failure; // first boundary-check violation, empty if none
    int steps_run = 0;
    std::vector<PipStepRecord> trace;
    PipState final_state;
};

/// Run a scripted scenario, checking validate/γ/φ/interface preservation at
/// every public-op boundary and recording each step's footprint.
PipRunReport pip_run_scenario(const PipState& initial, const std::vector<PipOp>& ops);

/// Seeded random scenario over fresh processes p1..pP (random default
/// priorities) and resources r1..rR; only preconditions-respecting ops are
/// generated. Same boundary checks as the scripted runner.
PipRunReport pip_run_random(std::uint64_t seed, int processes, int resources, int steps);

/// State file: {"processes": {id: def_prio}, "resources": {id: def_prio},
/// "next": {id: id}, "prios": {id: multiset}, "curr"?: {id: prio}} with
/// curr_prio derived when absent.
PipState pip_state_from_json(const Json& j);
Json pip_state_to_json(const PipState& s);

/// Scenario file: array of {"op": "acquire"|"release", "p": id, "r": id}.
std::vector<PipOp> pip_scenario_from_json(const Json& j);

Json pip_report_to_json(const PipRunReport& r);

} // namespace flow
