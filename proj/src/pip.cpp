#include "flow/pip.hpp"

#include <algorithm>
#include <functional>

namespace flow {

namespace {

const PipNode& node_at(const PipState& s, const NodeId& n, const std::string& who) {
    auto it = s.nodes.find(n);
    if (it == s.nodes.end()) throw InputError(who + ": unknown node " + n);
    return it->second;
}

Nat max_with_default(const Value& prios, Nat def) {
    if (prios.ms_nat.empty()) return def;
    return std::max(def, prios.ms_nat.rbegin()->first);
}

} // namespace

std::pair<Graph, FlowAssignment> pip_abstract(const PipState& s) {
    Graph g;
    g.domain = Domain::pip();
    FlowAssignment flow;
    for (const auto& [id, n] : s.nodes) {
        g.add_node(id);
        flow[id] = n.prios;
    }
    for (const auto& [id, n] : s.nodes)
        if (n.next) g.set_edge(id, *n.next, EdgeFunction::max_with(n.def_prio));
    return {std::move(g), std::move(flow)};
}

FlowGraph pip_flow_graph(const PipState& s) {
    auto [g, flow] = pip_abstract(s);
    auto v = validate_flow_graph(g, flow);
    if (auto* bad = std::get_if<NoInflow>(&v))
        throw InputError("pip state: prios at " + bad->node + " admit no inflow");
    return std::get<FlowGraph>(std::move(v));
}

bool pip_gamma(const PipState& s, const NodeId& n) {
    const PipNode& node = node_at(s, n, "pip_gamma");
    if (node.next && *node.next == n) return false;
    if (node.curr_prio != max_with_default(node.prios, node.def_prio)) return false;
    // prios must be exactly what the incoming edges deliver (empty inflow).
    Value expect = Value::of_multiset({});
    for (const auto& [id, other] : s.nodes) {
        if (!other.next || *other.next != n) continue;
        Value contrib = Value::of_multiset({max_with_default(other.prios, other.def_prio)});
        expect = monoid_add(expect, contrib);
    }
    return node.prios == expect;
}

bool pip_phi(const Interface& i) {
    if (!i.out.empty()) return false;
    return std::all_of(i.in.begin(), i.in.end(),
                       [](const auto& e) { return e.second.is_zero(); });
}

PipState pip_update(PipState s, const NodeId& n, long long from, long long to) {
    int budget = 4 * static_cast<int>(s.nodes.size());
    NodeId cur = n;
    while (true) {
        auto it = s.nodes.find(cur);
        if (it == s.nodes.end()) throw InputError("update: unknown node " + cur);
        if (budget-- == 0)
            throw ModelError("update: step budget 4*|nodes| exhausted at " + cur);
        PipNode& node = it->second;
        if (from >= 0) {
            auto e = node.prios.ms_nat.find(static_cast<Nat>(from));
            if (e != node.prios.ms_nat.end() && --e->second == 0) node.prios.ms_nat.erase(e);
        }
        if (to >= 0) node.prios.ms_nat[static_cast<Nat>(to)] += 1;
        from = static_cast<long long>(node.curr_prio);
        node.curr_prio = max_with_default(node.prios, node.def_prio);
        to = static_cast<long long>(node.curr_prio);
        if (from == to || !node.next) break;
        cur = *node.next;
    }
    return s;
}

PipState pip_acquire(PipState s, const NodeId& p, const NodeId& r) {
    const PipNode& pn = node_at(s, p, "acquire");
    const PipNode& rn = node_at(s, r, "acquire");
    if (p == r) throw InputError("acquire: process and resource coincide: " + p);
    if (pn.next) throw InputError("acquire: " + p + " is already waiting on " + *pn.next);
    if (!rn.next) {
        s.nodes[r].next = p;
        long long rc = static_cast<long long>(s.nodes[r].curr_prio);
        return pip_update(std::move(s), p, -1, rc);
    }
    s.nodes[p].next = r;
    long long pc = static_cast<long long>(s.nodes[p].curr_prio);
    return pip_update(std::move(s), r, -1, pc);
}

PipState pip_release(PipState s, const NodeId& p, const NodeId& r) {
    node_at(s, p, "release");
    const PipNode& rn = node_at(s, r, "release");
    if (!rn.next || *rn.next != p)
        throw InputError("release: " + r + " is not held by " + p);
    s.nodes[r].next = std::nullopt;
    long long rc = static_cast<long long>(s.nodes[r].curr_prio);
    return pip_update(std::move(s), p, rc, -1);
}

namespace {

std::uint64_t interface_digest(const Interface& i) {
    return fnv1a(dump_json(interface_to_json(i)));
}

// Boundary checks shared by both runners: the state must abstract to a
// valid flow graph whose interface is closed and equal to the reference,
// with gamma at every node.
std::optional<std::string> boundary_violation(const PipState& s, const Interface& reference) {
    Graph g;
    FlowAssignment flow;
    std::tie(g, flow) = pip_abstract(s);
    auto v = validate_flow_graph(g, flow);
    if (auto* bad = std::get_if<NoInflow>(&v))
        return "validate: prios at " + bad->node + " admit no inflow";
    const FlowGraph& h = std::get<FlowGraph>(v);
    for (const auto& entry : s.nodes)
        if (!pip_gamma(s, entry.first)) return "gamma fails at " + entry.first;
    Interface i = interface_of(h);
    if (!pip_phi(i)) return "phi fails: interface is not closed";
    if (!(i == reference)) return "interface differs from the initial one";
    return std::nullopt;
}

PipRunReport run_ops(const PipState& initial,
                     const std::function<std::optional<PipOp>(const PipState&, int)>& pick,
                     int max_steps) {
    PipRunReport report;
    PipState s = initial;
    Interface reference = interface_of(pip_flow_graph(s));
    if (auto bad = boundary_violation(s, reference)) {
        report.ok = false;
        report.failure = "initial state: " + *bad;
        report.final_state = std::move(s);
        return report;
    }
    for (int step = 0; step < max_steps; ++step) {
        auto op = pick(s, step);
        if (!op) break;
        FlowGraph before = pip_flow_graph(s);
        try {
            s = op->acquire ? pip_acquire(std::move(s), op->p, op->r)
                            : pip_release(std::move(s), op->p, op->r);
        } catch (const std::exception& e) {
            report.ok = false;
            report.failure = "step " + std::to_string(step) + ": " + e.what();
            break;
        }
        PipStepRecord rec;
        rec.step = step;
        rec.op = *op;
        if (auto bad = boundary_violation(s, reference)) {
            report.ok = false;
            report.failure = "step " + std::to_string(step) + ": " + *bad;
            report.trace.push_back(std::move(rec));
            break;
        }
        FlowGraph after = pip_flow_graph(s);
        rec.footprint = footprint(before, after);
        rec.interface_hash = interface_digest(interface_of(after));
        report.trace.push_back(std::move(rec));
        report.steps_run = step + 1;
    }
    report.final_state = std::move(s);
    return report;
}

} // namespace

PipRunReport pip_run_scenario(const PipState& initial, const std::vector<PipOp>& ops) {
    return run_ops(
        initial,
        [&](const PipState&, int step) -> std::optional<PipOp> {
            if (step >= static_cast<int>(ops.size())) return std::nullopt;
            return ops[static_cast<size_t>(step)];
        },
        static_cast<int>(ops.size()));
}

PipRunReport pip_run_random(std::uint64_t seed, int processes, int resources, int steps) {
    if (processes < 1 || resources < 1) throw InputError("pip run: need at least one of each");
    PipState s;
    Rng rng(seed);
    for (int i = 1; i <= processes; ++i) {
        NodeId id = "p" + std::to_string(i);
        PipNode n;
        n.def_prio = rng.below(5);
        n.curr_prio = n.def_prio;
        s.nodes[id] = std::move(n);
        s.kinds[id] = PipKind::Process;
    }
    for (int i = 1; i <= resources; ++i) {
        NodeId id = "r" + std::to_string(i);
        s.nodes[id] = PipNode{};
        s.kinds[id] = PipKind::Resource;
    }
    // Waiting is irreversible here (release never hands a resource over), so
    // the generator has to keep the system live by construction: a blocked
    // process issues nothing, a process only starts waiting on a resource
    // with a higher index than anything it holds (the waits-for relation
    // stays acyclic, so some holder is always runnable), and the last
    // runnable process never starts waiting. Together these leave at least
    // one candidate op at every step.
    auto res_index = [](const NodeId& rid) { return std::stoi(rid.substr(1)); };
    auto pick = [&rng, res_index](const PipState& st, int) -> std::optional<PipOp> {
        int runnable = 0;
        for (const auto& [pid, pk] : st.kinds)
            if (pk == PipKind::Process && !st.nodes.at(pid).next) ++runnable;
        std::vector<PipOp> candidates;
        for (const auto& [pid, pk] : st.kinds) {
            if (pk != PipKind::Process || st.nodes.at(pid).next) continue;
            int held_max = 0;
            for (const auto& [rid, rk] : st.kinds)
                if (rk == PipKind::Resource && st.nodes.at(rid).next == pid)
                    held_max = std::max(held_max, res_index(rid));
            for (const auto& [rid, rk] : st.kinds) {
                if (rk != PipKind::Resource) continue;
                const PipNode& rn = st.nodes.at(rid);
                if (!rn.next)
                    candidates.push_back({true, pid, rid});
                else if (*rn.next == pid)
                    candidates.push_back({false, pid, rid});
                else if (runnable > 1 && res_index(rid) > held_max)
                    candidates.push_back({true, pid, rid});
            }
        }
        if (candidates.empty()) return std::nullopt;
        return candidates[rng.below(candidates.size())];
    };
    return run_ops(s, pick, steps);
}

PipState pip_state_from_json(const Json& j) {
    require_keys(j, {"processes", "resources", "next", "prios", "curr"}, "pip state");
    PipState s;
    Domain d = Domain::pip();
    auto load_group = [&](const char* key, PipKind kind) {
        if (!j.contains(key)) return;
        if (!j[key].is_object())
            throw InputError("pip state: '" + std::string(key) + "' must map ids to priorities");
        for (const auto& [id, def] : j[key].items()) {
            if (s.nodes.count(id)) throw InputError("pip state: duplicate node " + id);
            PipNode n;
            if (!def.is_number_unsigned())
                throw InputError("pip state: default priority of " + id +
                                 " must be a non-negative integer");
            n.def_prio = def.get<Nat>();
            n.curr_prio = n.def_prio;
            s.nodes[id] = std::move(n);
            s.kinds[id] = kind;
        }
    };
    load_group("processes", PipKind::Process);
    load_group("resources", PipKind::Resource);
    if (j.contains("prios")) {
        if (!j["prios"].is_object()) throw InputError("pip state: 'prios' must be an object");
        for (const auto& [id, v] : j["prios"].items()) {
            auto it = s.nodes.find(id);
            if (it == s.nodes.end()) throw InputError("pip state: prios for unknown node " + id);
            it->second.prios = value_from_json(d, v, "pip prios at " + id);
            it->second.curr_prio = max_with_default(it->second.prios, it->second.def_prio);
        }
    }
    if (j.contains("next")) {
        if (!j["next"].is_object()) throw InputError("pip state: 'next' must be an object");
        for (const auto& [id, t] : j["next"].items()) {
            auto it = s.nodes.find(id);
            if (it == s.nodes.end()) throw InputError("pip state: next for unknown node " + id);
            if (!t.is_string() || !s.nodes.count(t.get<NodeId>()))
                throw InputError("pip state: next of " + id + " must name a node");
            it->second.next = t.get<NodeId>();
        }
    }
    if (j.contains("curr")) {
        if (!j["curr"].is_object()) throw InputError("pip state: 'curr' must be an object");
        for (const auto& [id, c] : j["curr"].items()) {
            auto it = s.nodes.find(id);
            if (it == s.nodes.end()) throw InputError("pip state: curr for unknown node " + id);
            if (!c.is_number_unsigned())
                throw InputError("pip state: curr of " + id + " must be a non-negative integer");
            it->second.curr_prio = c.get<Nat>();
        }
    }
    return s;
}

Json pip_state_to_json(const PipState& s) {
    Json procs = Json::object(), ress = Json::object(), next = Json::object(),
         prios = Json::object(), curr = Json::object();
    for (const auto& [id, n] : s.nodes) {
        auto k = s.kinds.find(id);
        bool proc = k == s.kinds.end() || k->second == PipKind::Process;
        (proc ? procs : ress)[id] = n.def_prio;
        if (n.next) next[id] = *n.next;
        if (!n.prios.is_zero()) prios[id] = value_to_json(n.prios);
        curr[id] = n.curr_prio;
    }
    Json o = Json::object();
    o["processes"] = std::move(procs);
    o["resources"] = std::move(ress);
    o["next"] = std::move(next);
    o["prios"] = std::move(prios);
    o["curr"] = std::move(curr);
    return o;
}

std::vector<PipOp> pip_scenario_from_json(const Json& j) {
    if (!j.is_array()) throw InputError("pip scenario: expected an array of ops");
    std::vector<PipOp> ops;
    for (const auto& entry : j) {
        require_keys(entry, {"op", "p", "r"}, "pip scenario op");
        for (const char* k : {"op", "p", "r"})
            if (!entry.contains(k) || !entry[k].is_string())
                throw InputError("pip scenario op: missing '" + std::string(k) + "'");
        PipOp op;
        std::string name = entry["op"].get<std::string>();
        if (name == "acquire") op.acquire = true;
        else if (name == "release") op.acquire = false;
        else throw InputError("pip scenario op: unknown op '" + name + "'");
        op.p = entry["p"].get<NodeId>();
        op.r = entry["r"].get<NodeId>();
        ops.push_back(std::move(op));
    }
    return ops;
}

Json pip_report_to_json(const PipRunReport& r) {
    Json o = Json::object();
    o["ok"] = r.ok;
    if (!r.ok) o["failure"] = r.failure;
    o["steps_run"] = r.steps_run;
    Json trace = Json::array();
    for (const auto& rec : r.trace) {
        Json e = Json::object();
        e["step"] = rec.step;
        e["op"] = rec.op.acquire ? "acquire" : "release";
        e["p"] = rec.op.p;
        e["r"] = rec.op.r;
        e["footprint"] = rec.footprint;
        e["interface_hash"] = rec.interface_hash;
        trace.push_back(std::move(e));
    }
    o["trace"] = std::move(trace);
    o["final_state"] = pip_state_to_json(r.final_state);
    return o;
}

} // namespace flow
