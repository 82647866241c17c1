#include "flow/extension.hpp"

#include <algorithm>

namespace flow {

namespace {

std::vector<Nat> delta_coeffs(size_t arity, bool hit) {
    return std::vector<Nat>(arity, hit ? 1 : 0);
}

bool all_zero(const std::vector<Nat>& v) {
    return std::all_of(v.begin(), v.end(), [](Nat c) { return c == 0; });
}

const Value& zero_of(const Domain& d) {
    static std::map<std::string, Value> cache;
    auto [it, fresh] = cache.try_emplace(d.name(), Value{});
    if (fresh) it->second = d.zero();
    return it->second;
}

Value flow_at(const FlowGraph& h, const NodeId& n) {
    auto it = h.flow.find(n);
    return it == h.flow.end() ? h.graph.domain.zero() : it->second;
}

Value inflow_at(const FlowGraph& h, const NodeId& n) {
    auto it = h.inflow.find(n);
    return it == h.inflow.end() ? h.graph.domain.zero() : it->second;
}

} // namespace

std::vector<Nat> Capacity::at(const NodeId& src, const NodeId& tgt) const {
    auto row = rows.find(src);
    if (row != rows.end()) {
        auto cell = row->second.find(tgt);
        if (cell != row->second.end()) return cell->second;
    }
    return delta_coeffs(arity, src == tgt);
}

Capacity capacity(const Graph& g) {
    if (!g.domain.endomorphic)
        throw CapabilityError("capacity: domain " + g.domain.name() + " has no endomorphic edges");
    Capacity cap;
    cap.depth = static_cast<int>(g.nodes.size());
    cap.arity = g.domain.arity;
    for (const auto& src : g.nodes) {
        std::map<NodeId, std::vector<Nat>> row;
        // Walks of length <= depth: a maximal simple escape path visits every
        // node and then leaves, so it has depth edges, one more than the
        // longest simple path between tracked nodes.
        for (int step = 0; step <= cap.depth; ++step) {
            std::map<NodeId, std::vector<Nat>> next;
            next[src] = delta_coeffs(cap.arity, true);
            for (const auto& [mid, coeffs] : row) {
                for (const auto& [key, e] : g.edges) {
                    if (key.first != mid || e.is_zero()) continue;
                    auto scale = as_coeffs(g.domain, e);
                    auto& cell = next[key.second];
                    if (cell.empty()) cell = delta_coeffs(cap.arity, false);
                    for (size_t j = 0; j < cap.arity; ++j) cell[j] += coeffs[j] * scale[j];
                }
            }
            row = std::move(next);
        }
        for (auto it = row.begin(); it != row.end();) {
            if (all_zero(it->second)) it = row.erase(it);
            else ++it;
        }
        cap.rows[src] = std::move(row);
    }
    return cap;
}

namespace {

// Anchored DFS: every simple cycle is reported once, rooted at its least node.
struct CycleEnum {
    const std::vector<NodeId>& nodes;
    const std::map<NodeId, std::vector<size_t>>& adj;
    std::vector<std::vector<size_t>> found;
    std::vector<size_t> path;
    std::vector<bool> on_path;
    size_t anchor = 0;
    std::uint64_t budget = 100000;

    void dfs(size_t cur) {
        path.push_back(cur);
        on_path[cur] = true;
        auto it = adj.find(nodes[cur]);
        if (it != adj.end()) {
            for (size_t nxt : it->second) {
                if (nxt < anchor) continue;
                if (nxt == anchor) {
                    if (found.size() == budget)
                        throw ResourceError("effective acyclicity: simple cycle budget exhausted");
                    found.push_back(path);
                } else if (!on_path[nxt]) {
                    dfs(nxt);
                }
            }
        }
        on_path[cur] = false;
        path.pop_back();
    }
};

} // namespace

EaResult check_effectively_acyclic(const FlowGraph& h) {
    const Domain& d = h.graph.domain;
    if (!d.endomorphic)
        throw CapabilityError("effective acyclicity: domain " + d.name() +
                              " edges are not endomorphisms");
    std::vector<NodeId> nodes(h.graph.nodes.begin(), h.graph.nodes.end());
    std::map<NodeId, size_t> index;
    for (size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;
    std::map<NodeId, std::vector<size_t>> adj;
    for (const auto& [key, e] : h.graph.edges) {
        if (e.is_zero()) continue;
        auto t = index.find(key.second);
        if (t == index.end()) continue; // outflow edge, not part of any cycle
        adj[key.first].push_back(t->second);
    }
    CycleEnum ce{nodes, adj, {}, {}, std::vector<bool>(nodes.size(), false)};
    for (size_t a = 0; a < nodes.size(); ++a) {
        ce.anchor = a;
        ce.dfs(a);
    }
    for (const auto& cyc : ce.found) {
        size_t k = cyc.size();
        for (size_t r = 0; r < k; ++r) {
            Value v = flow_at(h, nodes[cyc[r]]);
            for (size_t i = 0; i < k; ++i) {
                const NodeId& from = nodes[cyc[(r + i) % k]];
                const NodeId& to = nodes[cyc[(r + i + 1) % k]];
                v = edge_eval(d, h.graph.edge(from, to), v);
            }
            if (!v.is_zero()) {
                EaResult res;
                res.ea = false;
                for (size_t i = 0; i < k; ++i) res.witness_cycle.push_back(nodes[cyc[(r + i) % k]]);
                return res;
            }
        }
    }
    return {};
}

bool contextual_extension(const Interface& i1, const Interface& i2) {
    if (!(i1.domain == i2.domain)) throw InputError("contextual extension: domains differ");
    if (!std::includes(i2.dom.begin(), i2.dom.end(), i1.dom.begin(), i1.dom.end())) return false;
    for (const auto& n : i1.dom) {
        auto a = i1.in.find(n);
        auto b = i2.in.find(n);
        const Value& va = a == i1.in.end() ? zero_of(i1.domain) : a->second;
        const Value& vb = b == i2.in.end() ? zero_of(i1.domain) : b->second;
        if (!(va == vb)) return false;
    }
    std::set<NodeId> targets;
    for (const auto& [n, v] : i1.out) targets.insert(n);
    for (const auto& [n, v] : i2.out) targets.insert(n);
    for (const auto& n : targets) {
        if (i1.dom.count(n)) continue;
        auto a = i1.out.find(n);
        auto b = i2.out.find(n);
        const Value& va = a == i1.out.end() ? zero_of(i1.domain) : a->second;
        const Value& vb = b == i2.out.end() ? zero_of(i1.domain) : b->second;
        if (!(va == vb)) return false;
    }
    return true;
}

namespace {

bool scalevec_symbolic(const Domain& d) {
    return d.endomorphic && (d.kind == DomainKind::PathCount || d.kind == DomainKind::Product);
}

// All values below v in the pointwise order, the downset the subflow
// condition quantifies over.
std::vector<Value> enumerate_downset(const Domain& d, const Value& v, std::uint64_t cap) {
    std::vector<Value> out;
    auto guard = [&] {
        if (out.size() >= cap)
            throw ResourceError("subflow extension: inflow downset exceeds " + std::to_string(cap) +
                                " candidates");
    };
    switch (v.kind) {
    case ValueKind::Nat:
        for (Nat m = 0; m <= v.nat; ++m) {
            guard();
            out.push_back(Value::of_nat(m));
        }
        break;
    case ValueKind::MultisetNat: {
        std::vector<std::pair<Nat, Nat>> entries(v.ms_nat.begin(), v.ms_nat.end());
        std::vector<Nat> pick(entries.size(), 0);
        while (true) {
            guard();
            Value m = d.zero();
            for (size_t i = 0; i < entries.size(); ++i)
                if (pick[i] > 0) m.ms_nat[entries[i].first] = pick[i];
            out.push_back(std::move(m));
            size_t i = 0;
            for (; i < entries.size(); ++i) {
                if (pick[i] < entries[i].second) {
                    ++pick[i];
                    break;
                }
                pick[i] = 0;
            }
            if (i == entries.size()) break;
        }
        break;
    }
    case ValueKind::MultisetCost: {
        std::vector<std::pair<Cost, Nat>> entries(v.ms_cost.begin(), v.ms_cost.end());
        std::vector<Nat> pick(entries.size(), 0);
        while (true) {
            guard();
            Value m = d.zero();
            for (size_t i = 0; i < entries.size(); ++i)
                if (pick[i] > 0) m.ms_cost[entries[i].first] = pick[i];
            out.push_back(std::move(m));
            size_t i = 0;
            for (; i < entries.size(); ++i) {
                if (pick[i] < entries[i].second) {
                    ++pick[i];
                    break;
                }
                pick[i] = 0;
            }
            if (i == entries.size()) break;
        }
        break;
    }
    case ValueKind::MultisetNodeSet: {
        std::vector<std::pair<std::set<NodeId>, Nat>> entries(v.ms_sets.begin(), v.ms_sets.end());
        std::vector<Nat> pick(entries.size(), 0);
        while (true) {
            guard();
            Value m = d.zero();
            for (size_t i = 0; i < entries.size(); ++i)
                if (pick[i] > 0) m.ms_sets[entries[i].first] = pick[i];
            out.push_back(std::move(m));
            size_t i = 0;
            for (; i < entries.size(); ++i) {
                if (pick[i] < entries[i].second) {
                    ++pick[i];
                    break;
                }
                pick[i] = 0;
            }
            if (i == entries.size()) break;
        }
        break;
    }
    default:
        throw CapabilityError("subflow extension: domain " + d.name() +
                              " downsets cannot be enumerated");
    }
    return out;
}

// Sum over all walks src -> tgt of fewer than depth edges of the edge chain
// applied to m, plus m itself when src == tgt. Evaluates edges directly, so
// it also covers domains with no symbolic path closure.
Value eval_capacity(const Graph& g, const NodeId& src, const NodeId& tgt, const Value& m,
                    int depth) {
    const Domain& d = g.domain;
    Value acc = d.zero();
    struct Frame {
        NodeId node;
        Value val;
        int steps;
    };
    std::vector<Frame> stack;
    stack.push_back({src, m, 0});
    std::uint64_t visited = 0;
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (++visited > 2000000)
            throw ResourceError("subflow extension: capacity walk budget exhausted");
        if (f.node == tgt) acc = monoid_add(acc, f.val);
        if (f.steps + 1 > depth) continue; // walks of length <= depth, as in capacity()
        for (const auto& [key, e] : g.edges) {
            if (key.first != f.node || e.is_zero()) continue;
            if (f.val.is_zero() &&
                (e.kind == EdgeKind::Identity || e.kind == EdgeKind::ScaleVec ||
                 e.kind == EdgeKind::PathFilter))
                continue;
            stack.push_back({key.second, edge_eval(d, e, f.val), f.steps + 1});
        }
    }
    return acc;
}

std::set<NodeId> capacity_targets(const Graph& g) {
    std::set<NodeId> t = g.nodes;
    for (const auto& [key, e] : g.edges)
        if (!e.is_zero()) t.insert(key.second);
    return t;
}

} // namespace

bool subflow_preserving_extension(const FlowGraph& h, const FlowGraph& h2, SubflowMode mode,
                                  const SubflowLimits& limits) {
    const Domain& d = h.graph.domain;
    if (!(d == h2.graph.domain)) throw InputError("subflow extension: domains differ");
    if (!contextual_extension(interface_of(h), interface_of(h2))) return false;

    std::set<NodeId> outside;
    for (const auto& t : capacity_targets(h.graph))
        if (!h2.graph.nodes.count(t)) outside.insert(t);
    for (const auto& t : capacity_targets(h2.graph))
        if (!h2.graph.nodes.count(t)) outside.insert(t);

    if (mode == SubflowMode::Auto)
        mode = scalevec_symbolic(d) ? SubflowMode::Symbolic : SubflowMode::Enumerate;

    if (mode == SubflowMode::Symbolic) {
        if (!scalevec_symbolic(d))
            throw CapabilityError("subflow extension: domain " + d.name() +
                                  " has no symbolic path closure");
        size_t arity = static_cast<size_t>(d.arity);
        Capacity c1 = capacity(h.graph);
        Capacity c2 = capacity(h2.graph);
        // m |> ScaleVec(c) agrees for every m below the inflow iff the
        // coefficients agree on the inflow's positive components.
        auto positive = [&](const Value& v, size_t j) {
            return v.kind == ValueKind::Nat ? v.nat > 0 : v.vec[j] > 0;
        };
        for (const auto& n : h.graph.nodes) {
            Value in = inflow_at(h, n);
            for (const auto& t : outside) {
                auto a = c1.at(n, t);
                auto b = c2.at(n, t);
                for (size_t j = 0; j < arity; ++j)
                    if (positive(in, j) && a[j] != b[j]) return false;
            }
        }
        for (const auto& n : h2.graph.nodes) {
            if (h.graph.nodes.count(n)) continue;
            Value in = inflow_at(h2, n);
            for (const auto& t : outside) {
                auto b = c2.at(n, t);
                for (size_t j = 0; j < arity; ++j)
                    if (positive(in, j) && b[j] != 0) return false;
            }
        }
        return true;
    }

    if (!d.downset_enumerable)
        throw CapabilityError("subflow extension: domain " + d.name() +
                              " supports neither symbolic nor enumerated checks");
    int d1 = static_cast<int>(h.graph.nodes.size());
    int d2 = static_cast<int>(h2.graph.nodes.size());
    for (const auto& n : h.graph.nodes) {
        for (const auto& m : enumerate_downset(d, inflow_at(h, n), limits.downset_cap)) {
            // The empty cost multiset has no defined image under AddMinWith.
            if (m.is_zero() && m.kind == ValueKind::MultisetCost) continue;
            for (const auto& t : outside) {
                Value a = eval_capacity(h.graph, n, t, m, d1);
                Value b = eval_capacity(h2.graph, n, t, m, d2);
                if (!(a == b)) return false;
            }
        }
    }
    for (const auto& n : h2.graph.nodes) {
        if (h.graph.nodes.count(n)) continue;
        for (const auto& m : enumerate_downset(d, inflow_at(h2, n), limits.downset_cap)) {
            if (m.is_zero() && m.kind == ValueKind::MultisetCost) continue;
            for (const auto& t : outside) {
                Value b = eval_capacity(h2.graph, n, t, m, d2);
                if (!b.is_zero()) return false;
            }
        }
    }
    return true;
}

std::set<NodeId> footprint(const FlowGraph& h, const FlowGraph& h2) {
    if (h.graph.nodes != h2.graph.nodes)
        throw InputError("footprint: graphs cover different node sets");
    if (!(interface_of(h) == interface_of(h2)))
        throw InputError("footprint: interfaces differ, the rewrite is not frame-preserving");
    std::set<NodeId> fp;
    for (const auto& n : h.graph.nodes) {
        if (!(flow_at(h, n) == flow_at(h2, n))) {
            fp.insert(n);
            continue;
        }
        std::map<NodeId, EdgeFunction> row1, row2;
        for (const auto& [key, e] : h.graph.edges)
            if (key.first == n && !e.is_zero()) row1[key.second] = e;
        for (const auto& [key, e] : h2.graph.edges)
            if (key.first == n && !e.is_zero()) row2[key.second] = e;
        if (!(row1 == row2)) fp.insert(n);
    }
    return fp;
}

ReplaceResult replace_region(const FlowGraph& h, const std::set<NodeId>& x1,
                             const FlowGraph& h1new, ReplaceMode mode,
                             const SubflowLimits& limits) {
    for (const auto& n : x1)
        if (!h.graph.nodes.count(n))
            throw InputError("replace: region node " + n + " is not in the graph");
    std::set<NodeId> x2;
    for (const auto& n : h.graph.nodes)
        if (!x1.count(n)) x2.insert(n);

    FlowGraph h1 = restrict_flow_graph(h, x1);
    FlowGraph h2 = restrict_flow_graph(h, x2);
    Interface i1 = interface_of(h1);
    Interface i1n = interface_of(h1new);

    auto fresh_nodes = [&] {
        std::set<NodeId> fresh;
        for (const auto& n : h1new.graph.nodes)
            if (!x1.count(n)) fresh.insert(n);
        return fresh;
    };
    auto fresh_untouched = [&]() -> std::optional<NodeId> {
        FlowAssignment ctx_out = compute_outflow(h2);
        for (const auto& n : fresh_nodes())
            if (ctx_out.count(n)) return n;
        return std::nullopt;
    };

    if (mode == ReplaceMode::Equal) {
        if (!(i1n == i1))
            return ReplaceError{ReplaceErrorCode::RegionInterfaceMismatch,
                                "replacement interface differs from the region interface"};
    } else if (mode == ReplaceMode::Contextual) {
        if (!contextual_extension(i1, i1n))
            return ReplaceError{ReplaceErrorCode::NotContextual,
                                "replacement is not a contextual extension of the region"};
        if (auto n = fresh_untouched())
            return ReplaceError{ReplaceErrorCode::FreshNodeContextInflow,
                                "context sends flow into new node " + *n};
    } else {
        EaResult whole = check_effectively_acyclic(h);
        if (!whole.ea)
            return ReplaceError{ReplaceErrorCode::InputNotEa,
                                "input graph is not effectively acyclic"};
        if (!subflow_preserving_extension(h1, h1new, SubflowMode::Auto, limits))
            return ReplaceError{ReplaceErrorCode::NotSubflowPreserving,
                                "replacement does not preserve the region's subflows"};
        if (auto n = fresh_untouched())
            return ReplaceError{ReplaceErrorCode::FreshNodeContextInflow,
                                "context sends flow into new node " + *n};
    }

    auto composite = compose_flow_graphs(h1new, h2);
    if (!composite)
        return ReplaceError{ReplaceErrorCode::ComposeUndefined,
                            "replacement and context do not recompose"};

    ReplaceReport report;
    report.result = std::move(*composite);
    report.interface_equal = i1n == i1;
    report.interface_extended = contextual_extension(i1, i1n);
    if (mode == ReplaceMode::Subflow)
        report.result_ea = check_effectively_acyclic(report.result).ea;
    return report;
}

std::string replace_error_name(ReplaceErrorCode c) {
    switch (c) {
    case ReplaceErrorCode::RegionInterfaceMismatch: return "region-interface-mismatch";
    case ReplaceErrorCode::NotContextual: return "not-contextual";
    case ReplaceErrorCode::FreshNodeContextInflow: return "fresh-node-context-inflow";
    case ReplaceErrorCode::NotSubflowPreserving: return "not-subflow-preserving";
    case ReplaceErrorCode::InputNotEa: return "input-not-ea";
    case ReplaceErrorCode::ComposeUndefined: return "compose-undefined";
    }
    return "unknown";
}

} // namespace flow
