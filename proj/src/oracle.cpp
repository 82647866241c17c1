#include "flow/oracle.hpp"

#include <algorithm>

namespace flow::oracle {

namespace {

Value inflow_at(const Domain& d, const FlowAssignment& inflow, const NodeId& n) {
    auto it = inflow.find(n);
    return it == inflow.end() ? d.zero() : it->second;
}

constexpr std::uint64_t kCandidateCap = 100000;

// Odometer over counts 0..max_count for each element; put writes one entry.
template <typename Elem, typename Put>
void multiset_candidates(const Domain& d, const std::vector<Elem>& elems, Nat max_count,
                         std::vector<Value>& out, Put put) {
    std::vector<Nat> pick(elems.size(), 0);
    while (true) {
        if (out.size() >= kCandidateCap)
            throw ResourceError("oracle: candidate value space exceeds " +
                                std::to_string(kCandidateCap));
        Value v = d.zero();
        for (size_t i = 0; i < elems.size(); ++i)
            if (pick[i] > 0) put(v, elems[i], pick[i]);
        out.push_back(std::move(v));
        size_t i = 0;
        for (; i < elems.size(); ++i) {
            if (pick[i] < max_count) {
                ++pick[i];
                break;
            }
            pick[i] = 0;
        }
        if (i == elems.size()) break;
    }
}

// Node sets reachable from the inflow's sets under the graph's PathFilter
// edges; the only sets a flow can mention.
std::vector<std::set<NodeId>> reachable_sets(const Graph& g, const FlowAssignment& inflow,
                                             Nat max_set_size) {
    std::set<std::set<NodeId>> sets;
    sets.insert({});
    for (const auto& [n, v] : inflow)
        for (const auto& [s, c] : v.ms_sets)
            if (s.size() <= max_set_size) sets.insert(s);
    std::vector<NodeId> filters;
    for (const auto& [key, e] : g.edges)
        if (e.kind == EdgeKind::PathFilter) filters.push_back(e.node);
    bool grew = true;
    while (grew) {
        grew = false;
        std::set<std::set<NodeId>> next = sets;
        for (const auto& s : sets) {
            for (const auto& f : filters) {
                if (s.count(f) || s.size() >= max_set_size) continue;
                std::set<NodeId> bigger = s;
                bigger.insert(f);
                if (next.insert(bigger).second) grew = true;
            }
        }
        if (next.size() > 16) throw ResourceError("oracle: node-set universe too large");
        sets = std::move(next);
    }
    return {sets.begin(), sets.end()};
}

std::vector<Value> candidate_values(const Graph& g, const FlowAssignment& inflow,
                                    const EnumBounds& b) {
    const Domain& d = g.domain;
    std::vector<Value> out;
    switch (d.value_kind()) {
    case ValueKind::Nat:
        for (Nat m = 0; m <= b.value_bound; ++m) out.push_back(Value::of_nat(m));
        break;
    case ValueKind::NatVec: {
        size_t k = static_cast<size_t>(d.arity);
        std::vector<Nat> pick(k, 0);
        while (true) {
            if (out.size() >= kCandidateCap)
                throw ResourceError("oracle: candidate value space exceeds " +
                                    std::to_string(kCandidateCap));
            out.push_back(Value::of_vec(pick));
            size_t i = 0;
            for (; i < k; ++i) {
                if (pick[i] < b.value_bound) {
                    ++pick[i];
                    break;
                }
                pick[i] = 0;
            }
            if (i == k) break;
        }
        break;
    }
    case ValueKind::MultisetNat: {
        std::vector<Nat> elems;
        for (Nat e = 0; e <= b.max_elem; ++e) elems.push_back(e);
        multiset_candidates(d, elems, b.max_count, out,
                            [](Value& v, Nat e, Nat c) { v.ms_nat[e] = c; });
        break;
    }
    case ValueKind::MultisetCost: {
        std::vector<Cost> elems;
        for (Nat e = 0; e <= b.max_elem; ++e) elems.push_back(Cost::of(e));
        elems.push_back(Cost::infinity());
        multiset_candidates(d, elems, b.max_count, out,
                            [](Value& v, const Cost& e, Nat c) { v.ms_cost[e] = c; });
        break;
    }
    case ValueKind::MultisetNodeSet: {
        auto elems = reachable_sets(g, inflow, b.max_set_size);
        multiset_candidates(d, elems, b.max_count, out,
                            [](Value& v, const std::set<NodeId>& e, Nat c) { v.ms_sets[e] = c; });
        break;
    }
    }
    return out;
}

bool within_bounds(const Value& v, const EnumBounds& b) {
    switch (v.kind) {
    case ValueKind::Nat: return v.nat <= b.value_bound;
    case ValueKind::NatVec:
        return std::all_of(v.vec.begin(), v.vec.end(),
                           [&](Nat c) { return c <= b.value_bound; });
    case ValueKind::MultisetNat:
        return std::all_of(v.ms_nat.begin(), v.ms_nat.end(), [&](const auto& e) {
            return e.first <= b.max_elem && e.second <= b.max_count;
        });
    case ValueKind::MultisetCost:
        return std::all_of(v.ms_cost.begin(), v.ms_cost.end(), [&](const auto& e) {
            return (e.first.inf || e.first.finite <= b.max_elem) && e.second <= b.max_count;
        });
    case ValueKind::MultisetNodeSet:
        return std::all_of(v.ms_sets.begin(), v.ms_sets.end(), [&](const auto& e) {
            return e.first.size() <= b.max_set_size && e.second <= b.max_count;
        });
    }
    return false;
}

struct Search {
    const Graph& g;
    const FlowAssignment& inflow;
    const EnumBounds& bounds;
    Search(const Graph& gg, const FlowAssignment& in, const EnumBounds& bb)
        : g(gg), inflow(in), bounds(bb) {}
    std::vector<NodeId> order;
    std::map<NodeId, std::vector<std::pair<NodeId, EdgeFunction>>> preds;
    std::vector<std::vector<NodeId>> check_at; // equations completed per depth
    std::vector<bool> forced;                  // node value determined by its preds
    std::vector<Value> candidates;
    FlowAssignment flow;
    std::vector<FlowAssignment> solutions;
    std::uint64_t states = 0;

    Value rhs(const NodeId& n) const {
        Value acc = inflow_at(g.domain, inflow, n);
        for (const auto& [p, e] : preds.at(n))
            acc = monoid_add(acc, edge_eval(g.domain, e, flow.at(p)));
        return acc;
    }

    void run(size_t depth) {
        if (depth == order.size()) {
            solutions.push_back(flow);
            return;
        }
        const NodeId& n = order[depth];
        auto try_value = [&](Value v) {
            if (++states > bounds.state_cap)
                throw ResourceError("oracle: state cap exceeded after " +
                                    std::to_string(states - 1) + " assignments");
            flow[n] = std::move(v);
            for (const auto& m : check_at[depth])
                if (!(flow.at(m) == rhs(m))) return;
            run(depth + 1);
        };
        if (forced[depth]) {
            Value v = rhs(n);
            if (within_bounds(v, bounds)) try_value(std::move(v));
        } else {
            for (const auto& v : candidates) try_value(v);
        }
        flow.erase(n);
    }
};

} // namespace

std::vector<FlowAssignment> enumerate_flows(const Graph& g, const FlowAssignment& inflow,
                                            const EnumBounds& bounds) {
    if (g.nodes.size() > 8)
        throw InputError("oracle: enumeration is limited to 8 nodes, got " +
                         std::to_string(g.nodes.size()));
    for (const auto& [n, v] : inflow) {
        if (!g.nodes.count(n)) throw InputError("oracle: inflow names unknown node " + n);
        require_value(g.domain, v, "oracle inflow");
    }

    Search s{g, inflow, bounds};
    for (const auto& n : g.nodes) s.preds[n] = {};
    for (const auto& [key, e] : g.edges) {
        if (e.is_zero()) continue;
        if (s.preds.count(key.second)) s.preds[key.second].push_back({key.first, e});
    }

    // Breadth-first from the inflow sources keeps most nodes forced.
    std::map<NodeId, size_t> pos;
    std::vector<NodeId> queue;
    for (const auto& [n, v] : inflow)
        if (!v.is_zero()) queue.push_back(n);
    std::sort(queue.begin(), queue.end());
    for (size_t head = 0; head < queue.size(); ++head) {
        const NodeId& n = queue[head];
        if (pos.count(n)) continue;
        pos[n] = s.order.size();
        s.order.push_back(n);
        for (const auto& [key, e] : g.edges)
            if (key.first == n && !e.is_zero() && g.nodes.count(key.second) &&
                !pos.count(key.second))
                queue.push_back(key.second);
    }
    for (const auto& n : g.nodes) {
        if (pos.count(n)) continue;
        pos[n] = s.order.size();
        s.order.push_back(n);
    }

    s.check_at.resize(s.order.size());
    s.forced.assign(s.order.size(), false);
    for (const auto& n : g.nodes) {
        size_t ready = pos[n];
        bool all_before = true;
        for (const auto& [p, e] : s.preds[n]) {
            ready = std::max(ready, pos[p]);
            if (pos[p] >= pos[n]) all_before = false;
        }
        s.check_at[ready].push_back(n);
        if (all_before) s.forced[pos[n]] = true;
    }

    bool any_free = std::any_of(s.forced.begin(), s.forced.end(), [](bool f) { return !f; });
    if (any_free) s.candidates = candidate_values(g, inflow, bounds);
    s.run(0);
    std::sort(s.solutions.begin(), s.solutions.end());
    return s.solutions;
}

std::optional<std::vector<NodeId>> brute_cycle_check(const FlowGraph& h, int max_len) {
    const Domain& d = h.graph.domain;
    if (!d.endomorphic)
        throw CapabilityError("brute cycle check: domain " + d.name() +
                              " edges are not endomorphisms");
    std::map<NodeId, std::vector<std::pair<NodeId, const EdgeFunction*>>> adj;
    for (const auto& [key, e] : h.graph.edges)
        if (!e.is_zero() && h.graph.nodes.count(key.second))
            adj[key.first].push_back({key.second, &e});

    struct Frame {
        NodeId node;
        Value val;
        std::vector<NodeId> walk;
    };
    std::uint64_t budget = 5000000;
    for (const auto& start : h.graph.nodes) {
        auto it0 = h.flow.find(start);
        Value v0 = it0 == h.flow.end() ? d.zero() : it0->second;
        if (v0.is_zero()) continue; // endomorphic chains keep zero at zero
        std::vector<Frame> stack;
        stack.push_back({start, v0, {start}});
        while (!stack.empty()) {
            Frame f = std::move(stack.back());
            stack.pop_back();
            if (budget-- == 0) throw ResourceError("brute cycle check: walk budget exhausted");
            auto it = adj.find(f.node);
            if (it == adj.end()) continue;
            for (const auto& [t, e] : it->second) {
                Value v = edge_eval(d, *e, f.val);
                if (t == start && !v.is_zero()) return f.walk;
                if (v.is_zero()) continue;
                if (static_cast<int>(f.walk.size()) + 1 <= max_len) {
                    Frame g2{t, std::move(v), f.walk};
                    g2.walk.push_back(t);
                    stack.push_back(std::move(g2));
                }
            }
        }
    }
    return std::nullopt;
}

std::set<NodeId> minimal_footprint_search(const FlowGraph& h, const FlowGraph& h2) {
    if (h.graph.nodes != h2.graph.nodes)
        throw InputError("footprint search: graphs cover different node sets");
    if (!(h.graph.domain == h2.graph.domain))
        throw InputError("footprint search: domains differ");
    size_t n = h.graph.nodes.size();
    if (n > 16) throw ResourceError("footprint search: too many nodes for subset enumeration");
    std::vector<NodeId> nodes(h.graph.nodes.begin(), h.graph.nodes.end());

    std::vector<std::uint32_t> masks;
    masks.reserve(1u << n);
    for (std::uint32_t m = 0; m < (1u << n); ++m) masks.push_back(m);
    std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
        int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        return pa != pb ? pa < pb : a < b;
    });

    for (std::uint32_t m : masks) {
        std::set<NodeId> region, rest;
        for (size_t i = 0; i < n; ++i)
            (m & (1u << i) ? region : rest).insert(nodes[i]);
        FlowGraph r1 = restrict_flow_graph(h, rest);
        FlowGraph r2 = restrict_flow_graph(h2, rest);
        if (!(r1 == r2)) continue;
        FlowGraph x1 = restrict_flow_graph(h, region);
        FlowGraph x2 = restrict_flow_graph(h2, region);
        if (interface_of(x1) == interface_of(x2)) return region;
    }
    throw InputError("footprint search: no agreeing decomposition, interfaces differ");
}

std::optional<Interface> interface_compose_oracle(const FlowGraph& h1, const FlowGraph& h2) {
    auto composite = compose_flow_graphs(h1, h2);
    if (!composite) return std::nullopt;
    return interface_of(*composite);
}

} // namespace flow::oracle
