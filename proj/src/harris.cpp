#include "flow/harris.hpp"

#include <algorithm>
#include <coroutine>
#include <exception>
#include <limits>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

namespace flow {

namespace {

Domain harris_domain() {
    return make_product_domain(Domain::path_count(), Domain::path_count());
}

Value hv(Nat a, Nat b) { return Value::of_vec({a, b}); }

constexpr std::int64_t kKeyMin = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kKeyMax = std::numeric_limits<std::int64_t>::max();

/// Graph plus root inflow, before solving.
std::pair<Graph, FlowAssignment> build_abstraction(const HarrisHeap& h) {
    Graph g;
    g.domain = harris_domain();
    for (const auto& id : h.shared) {
        if (!h.nodes.count(id))
            throw InputError("harris_abstract: shared node missing from heap: " + id);
        g.add_node(id);
    }
    for (const auto& id : h.shared) {
        const HarrisNode& n = h.nodes.at(id);
        const std::optional<NodeId>& tn = n.next.target;
        const std::optional<NodeId>& tf = n.fnext;
        if (tn && tf && *tn == *tf) {
            g.set_edge(id, *tn, EdgeFunction::identity());
        } else {
            if (tn) g.set_edge(id, *tn, EdgeFunction::scale_vec({1, 0}));
            if (tf) g.set_edge(id, *tf, EdgeFunction::scale_vec({0, 1}));
        }
    }
    if (!h.shared.count(h.mh) || !h.shared.count(h.fh))
        throw InputError("harris_abstract: roots mh and fh must be shared nodes");
    FlowAssignment inflow;
    for (const auto& id : g.nodes) inflow[id] = g.domain.zero();
    inflow[h.mh] = monoid_add(inflow[h.mh], hv(1, 0));
    inflow[h.fh] = monoid_add(inflow[h.fh], hv(0, 1));
    return {std::move(g), std::move(inflow)};
}

} // namespace

FlowGraph harris_flow_graph(const HarrisHeap& h) {
    auto [g, inflow] = build_abstraction(h);
    SolveResult r = solve_flow(g, inflow, SolveStrategy::Capacity);
    if (r.outcome != SolveOutcome::Solved)
        throw ModelError("harris_flow_graph: abstraction has no flow (" +
                         solve_outcome_name(r.outcome) +
                         (r.detail.empty() ? "" : ": " + r.detail) + ")");
    return FlowGraph{std::move(g), std::move(*r.flow), std::move(inflow)};
}

std::pair<Graph, FlowAssignment> harris_abstract(const HarrisHeap& h) {
    FlowGraph fg = harris_flow_graph(h);
    return {std::move(fg.graph), std::move(fg.flow)};
}

HarrisCheckReport harris_check(const HarrisHeap& h) {
    HarrisCheckReport rep;
    auto bad = [&](std::string m) {
        rep.ok = false;
        rep.violations.push_back(std::move(m));
    };

    for (const auto& id : h.shared)
        if (!h.nodes.count(id)) bad("shared node missing from heap: " + id);
    if (!h.nodes.count(h.mh) || !h.shared.count(h.mh)) bad("root mh is not a shared node: " + h.mh);
    if (!h.nodes.count(h.fh) || !h.shared.count(h.fh)) bad("root fh is not a shared node: " + h.fh);
    if (!h.nodes.count(h.ft) || !h.shared.count(h.ft)) bad("root ft is not a shared node: " + h.ft);
    if (!rep.ok) return rep;

    // (a) the next-list from mh is null-terminated and stays shared
    std::vector<NodeId> main_list;
    {
        std::set<NodeId> seen;
        std::optional<NodeId> cur = h.mh;
        while (cur) {
            if (!seen.insert(*cur).second) {
                bad("main next-list cycles at " + *cur);
                break;
            }
            if (!h.shared.count(*cur)) {
                bad("main next-list reaches unshared node " + *cur);
                break;
            }
            main_list.push_back(*cur);
            cur = h.nodes.at(*cur).next.target;
        }
    }

    // (b) the fnext-list from fh is null-terminated and stays shared
    std::vector<NodeId> free_list;
    {
        std::set<NodeId> seen;
        std::optional<NodeId> cur = h.fh;
        while (cur) {
            if (!seen.insert(*cur).second) {
                bad("free fnext-list cycles at " + *cur);
                break;
            }
            if (!h.shared.count(*cur)) {
                bad("free fnext-list reaches unshared node " + *cur);
                break;
            }
            free_list.push_back(*cur);
            cur = h.nodes.at(*cur).fnext;
        }
    }

    // (c) next edges from free-list nodes land in the node set
    for (const auto& id : free_list) {
        const std::optional<NodeId>& tn = h.nodes.at(id).next.target;
        if (tn && !h.shared.count(*tn))
            bad("free-list node " + id + " has a next edge leaving the node set: " + *tn);
    }

    // (d) ft sits on the free list; free-list nodes are marked
    if (std::find(free_list.begin(), free_list.end(), h.ft) == free_list.end())
        bad("ft (" + h.ft + ") is not on the free list");
    for (const auto& id : free_list)
        if (!h.nodes.at(id).next.mark) bad("free-list node " + id + " is unmarked");

    FlowGraph fg;
    try {
        fg = harris_flow_graph(h);
    } catch (const std::exception& e) {
        bad(std::string("abstraction: ") + e.what());
        return rep;
    }

    EaResult ea = check_effectively_acyclic(fg);
    if (!ea.ea) {
        std::string cyc;
        for (const auto& n : ea.witness_cycle) cyc += (cyc.empty() ? "" : ",") + n;
        bad("abstraction is not effectively acyclic (cycle " + cyc + ")");
    }

    const Value f10 = hv(1, 0), f01 = hv(0, 1), f11 = hv(1, 1);
    for (const auto& id : h.shared) {
        const HarrisNode& n = h.nodes.at(id);
        const Value& fl = fg.flow.at(id);
        if (!(fl == f10 || fl == f01 || fl == f11))
            bad("gamma: node " + id + " is on neither list shape (flow outside {(1,0),(0,1),(1,1)})");
        else if (!(fl == f10) && !n.next.mark)
            bad("gamma: node " + id + " carries free-list flow but is unmarked");
        if (id == h.ft && (fl.vec.size() != 2 || fl.vec[1] != 1))
            bad("gamma: ft node " + id + " lacks free-list flow");
        if (!n.next.mark && n.fnext)
            bad("gamma: unmarked node " + id + " has fnext set");
    }

    // φ: closed but for the two root inflows
    Interface itf = interface_of(fg);
    for (const auto& [nid, v] : itf.in) {
        Value want = fg.graph.domain.zero();
        if (nid == h.mh) want = monoid_add(want, f10);
        if (nid == h.fh) want = monoid_add(want, f01);
        if (!(v == want)) bad("phi: inflow at " + nid + " differs from the root inflow");
    }
    for (const auto& [nid, v] : itf.out) {
        (void)v;
        bad("phi: region sends outflow to " + nid);
    }

    return rep;
}

std::string harris_action_name(HarrisActionKind k) {
    switch (k) {
    case HarrisActionKind::Insert: return "insert";
    case HarrisActionKind::Mark: return "mark";
    case HarrisActionKind::Link: return "link";
    case HarrisActionKind::Unlink: return "unlink";
    case HarrisActionKind::LocalOnly: return "local";
    }
    return "local";
}

HarrisAction classify_action(const HarrisHeap& pre, const HarrisHeap& post) {
    std::vector<NodeId> changed;
    for (const auto& [id, n] : pre.nodes) {
        auto it = post.nodes.find(id);
        if (it != post.nodes.end() && !(it->second == n)) changed.push_back(id);
    }
    std::set<NodeId> freshly_shared;
    for (const auto& id : post.shared)
        if (!pre.shared.count(id)) freshly_shared.insert(id);

    HarrisAction act;
    if (changed.empty()) {
        if (!freshly_shared.empty())
            throw ModelError("classify_action: node became shared without a heap write");
        return act; // LocalOnly; covers ft moves and pure reads
    }
    if (changed.size() > 1)
        throw ModelError("classify_action: " + std::to_string(changed.size()) +
                         " nodes changed in a single step");

    const NodeId x = changed.front();
    const HarrisNode& a = pre.nodes.at(x);
    const HarrisNode& b = post.nodes.at(x);

    FlowGraph pre_h = harris_flow_graph(pre);
    FlowGraph post_h = harris_flow_graph(post);
    auto iface = [](const FlowGraph& g, const std::set<NodeId>& region) {
        return interface_of(restrict_flow_graph(g, region));
    };

    if (a.next == b.next && a.fnext != b.fnext) {
        if (a.fnext || !b.fnext)
            throw ModelError("classify_action: fnext changed other than null to node at " + x);
        NodeId r = *b.fnext;
        act.kind = HarrisActionKind::Link;
        act.touched = {x, r};
        if (!(iface(pre_h, act.touched) == iface(post_h, act.touched)))
            act.side_condition_failure = "link: interface of {" + x + "," + r + "} changed";
        return act;
    }

    if (a.fnext == b.fnext && !(a.next == b.next)) {
        if (a.next.target == b.next.target && !a.next.mark && b.next.mark) {
            act.kind = HarrisActionKind::Mark;
            act.touched = {x};
            if (!(iface(pre_h, act.touched) == iface(post_h, act.touched)))
                act.side_condition_failure = "mark: interface of {" + x + "} changed";
            return act;
        }
        if (a.next.mark == b.next.mark && !a.next.mark && a.next.target && b.next.target &&
            *a.next.target != *b.next.target) {
            const NodeId r_old = *a.next.target;
            const NodeId n_new = *b.next.target;
            if (freshly_shared.count(n_new)) {
                act.kind = HarrisActionKind::Insert;
                act.touched = {x, n_new};
                FlowGraph r1 = restrict_flow_graph(pre_h, {x});
                FlowGraph r2 = restrict_flow_graph(post_h, {x, n_new});
                if (!contextual_extension(interface_of(r1), interface_of(r2)))
                    act.side_condition_failure =
                        "insert: region {" + x + "} does not contextually extend to {" + x + "," + n_new + "}";
                else if (!subflow_preserving_extension(r1, r2))
                    act.side_condition_failure =
                        "insert: extension at {" + x + "," + n_new + "} is not subflow-preserving";
                return act;
            }
            auto rit = pre.nodes.find(r_old);
            if (pre.shared.count(r_old) && rit != pre.nodes.end() && rit->second.next.mark &&
                rit->second.next.target && *rit->second.next.target == n_new) {
                act.kind = HarrisActionKind::Unlink;
                act.touched = {x, r_old};
                if (!(iface(pre_h, act.touched) == iface(post_h, act.touched)))
                    act.side_condition_failure = "unlink: interface of {" + x + "," + r_old + "} changed";
                return act;
            }
            throw ModelError("classify_action: next retarget at " + x +
                             " is neither an insert nor an unlink");
        }
        throw ModelError("classify_action: unsupported next change at " + x);
    }

    throw ModelError("classify_action: node " + x + " changed both fields in one step");
}

HarrisHeap harris_initial_heap() {
    HarrisHeap h;
    h.mh = "head";
    h.fh = "fs";
    h.ft = "fs";
    h.nodes["head"] = HarrisNode{kKeyMin, TaggedRef{"tail", false}, std::nullopt};
    h.nodes["tail"] = HarrisNode{kKeyMax, TaggedRef{std::nullopt, false}, std::nullopt};
    // The free list starts non-empty: one drained, marked seed node, so Link
    // always has a tail to append to.
    h.nodes["fs"] = HarrisNode{kKeyMin, TaggedRef{"tail", true}, std::nullopt};
    h.shared = {"head", "tail", "fs"};
    return h;
}

HarrisHeap harris_example_heap() {
    HarrisHeap h;
    h.mh = "head";
    h.fh = "n2";
    h.ft = "n10";
    auto node = [&](const NodeId& id, std::int64_t key, std::optional<NodeId> next, bool mark,
                    std::optional<NodeId> fnext) {
        h.nodes[id] = HarrisNode{key, TaggedRef{std::move(next), mark}, std::move(fnext)};
        h.shared.insert(id);
    };
    node("head", kKeyMin, "n3", false, std::nullopt);
    node("n3", 3, "n5", false, std::nullopt);
    node("n5", 5, "n9", true, "n10");
    node("n9", 9, "n10", false, std::nullopt);
    node("n10", 10, "n12", true, std::nullopt);
    node("n12", 12, "tail", false, std::nullopt);
    node("tail", kKeyMax, std::nullopt, false, std::nullopt);
    node("n2", 2, "n3", true, "n6");
    node("n6", 6, "n9", true, "n1");
    node("n1", 1, "n2", true, "n7");
    node("n7", 7, "n9", true, "n5");
    return h;
}

namespace {

// Everything that crosses the coroutine/scheduler boundary is trivially
// copyable: gcc 11's coroutine lowering duplicates non-trivial temporaries
// inside co_await expressions bitwise, which shears std::string's
// small-buffer self-reference. Threads therefore address nodes through
// dense int handles; only the scheduler side touches NodeIds.

/// Wire form of a tagged reference; target -1 encodes null.
struct RefW {
    int target = -1;
    bool mark = false;
};

/// One pending shared-heap access, published by a suspended thread and
/// filled in by the scheduler.
struct SharedRequest {
    enum class Kind { None, ReadNext, CasNext, CasFnext, ReadFt, WriteFt };
    Kind kind = Kind::None;
    int node = -1;     // target node for field accesses
    RefW expected;     // CasNext
    RefW desired;      // CasNext
    int fdesired = -1; // CasFnext (expected is always null)
    int ft_desired = -1;

    RefW ref_out;   // ReadNext
    int ft_out = -1; // ReadFt
    bool ok = false; // CAS outcomes
};
static_assert(std::is_trivially_copyable_v<SharedRequest>);

/// The slice of the simulation the thread procedures may touch directly:
/// immutable keys, private-node management, and the ghost free-list set.
/// All shared access goes through SharedRequest.
struct SimCore {
    HarrisHeap* heap = nullptr;
    std::vector<NodeId> ids;         // handle -> id
    std::map<NodeId, int> handles;   // id -> handle
    std::set<int> ever_linked;       // ghost: ever placed on the free list
    int fresh_counter = 0;

    int handle(const NodeId& id) {
        auto it = handles.find(id);
        if (it != handles.end()) return it->second;
        int h = static_cast<int>(ids.size());
        ids.push_back(id);
        handles.emplace(id, h);
        return h;
    }

    const NodeId& id_of(int h) const { return ids.at(static_cast<size_t>(h)); }

    RefW to_wire(const TaggedRef& r) {
        return RefW{r.target ? handle(*r.target) : -1, r.mark};
    }
    TaggedRef from_wire(const RefW& r) const {
        return TaggedRef{r.target >= 0 ? std::optional<NodeId>(id_of(r.target)) : std::nullopt,
                         r.mark};
    }

    std::int64_t key_of(int h) const { return heap->nodes.at(id_of(h)).key; } // keys are immutable
    int mh() { return handle(heap->mh); }
    bool linked(int h) const { return ever_linked.count(h) != 0; }

    int alloc_private(std::int64_t key) {
        NodeId id = "x" + std::to_string(fresh_counter++);
        heap->nodes[id] = HarrisNode{key, TaggedRef{}, std::nullopt};
        return handle(id);
    }
    void free_private(int h) {
        const NodeId& id = id_of(h);
        if (heap->shared.count(id)) throw ModelError("free of a shared node: " + id);
        heap->nodes.erase(id);
    }
    void set_private_next(int h, const RefW& r) {
        const NodeId& id = id_of(h);
        if (heap->shared.count(id)) throw ModelError("private write to a shared node: " + id);
        heap->nodes.at(id).next = from_wire(r);
    }

    /// Apply one pending request to the heap. True if shared state changed.
    bool apply(SharedRequest& q) {
        switch (q.kind) {
        case SharedRequest::Kind::ReadNext:
            q.ref_out = to_wire(heap->nodes.at(id_of(q.node)).next);
            return false;
        case SharedRequest::Kind::CasNext: {
            HarrisNode& n = heap->nodes.at(id_of(q.node));
            q.ok = n.next == from_wire(q.expected);
            if (!q.ok) return false;
            n.next = from_wire(q.desired);
            if (q.desired.target >= 0) {
                const NodeId& t = id_of(q.desired.target);
                if (!heap->shared.count(t) && heap->nodes.count(t))
                    heap->shared.insert(t); // a private node went public
            }
            return true;
        }
        case SharedRequest::Kind::CasFnext: {
            HarrisNode& n = heap->nodes.at(id_of(q.node));
            q.ok = !n.fnext.has_value();
            if (!q.ok) return false;
            n.fnext = id_of(q.fdesired);
            ever_linked.insert(q.fdesired);
            return true;
        }
        case SharedRequest::Kind::ReadFt:
            q.ft_out = handle(heap->ft);
            return false;
        case SharedRequest::Kind::WriteFt:
            heap->ft = id_of(q.ft_desired);
            return true;
        case SharedRequest::Kind::None:
            break;
        }
        throw ModelError("step: thread has no pending shared access");
    }
};

struct ThreadCtx {
    SharedRequest req;
    std::coroutine_handle<> current; // deepest suspended coroutine
    SimCore* sim = nullptr;
    int inserts_seen = 0; // Insert actions attributed to the running op
    int marks_seen = 0;   // Mark actions attributed to the running op
};

template <typename T> struct [[nodiscard]] OpTask {
    static_assert(std::is_trivially_copyable_v<T>);

    struct promise_type {
        std::optional<T> value;
        std::exception_ptr exc;
        std::coroutine_handle<> continuation;

        OpTask get_return_object() {
            return OpTask{std::coroutine_handle<promise_type>::from_promise(*this)};
        }
        std::suspend_always initial_suspend() noexcept { return {}; }
        struct FinalAwait {
            bool await_ready() noexcept { return false; }
            std::coroutine_handle<> await_suspend(std::coroutine_handle<promise_type> h) noexcept {
                auto c = h.promise().continuation;
                return c ? c : std::noop_coroutine();
            }
            void await_resume() noexcept {}
        };
        FinalAwait final_suspend() noexcept { return {}; }
        void return_value(T v) { value = v; }
        void unhandled_exception() { exc = std::current_exception(); }
    };

    using Handle = std::coroutine_handle<promise_type>;
    Handle h;

    explicit OpTask(Handle hh) : h(hh) {}
    OpTask(OpTask&& o) noexcept : h(std::exchange(o.h, {})) {}
    OpTask(const OpTask&) = delete;
    OpTask& operator=(const OpTask&) = delete;
    OpTask& operator=(OpTask&& o) noexcept {
        if (this != &o) {
            if (h) h.destroy();
            h = std::exchange(o.h, {});
        }
        return *this;
    }
    ~OpTask() {
        if (h) h.destroy();
    }

    // Awaiting a nested task transfers control into it; it resumes the
    // parent from its final suspend. The awaiter carries only the handle
    // and the task itself stays a named local in the parent, owning the
    // frame.
    struct Awaiter {
        Handle h;
        bool await_ready() { return false; }
        std::coroutine_handle<> await_suspend(std::coroutine_handle<> parent) {
            h.promise().continuation = parent;
            return h;
        }
        T await_resume() {
            if (h.promise().exc) std::rethrow_exception(h.promise().exc);
            return *h.promise().value;
        }
    };
    Awaiter operator co_await() { return Awaiter{h}; }
};

struct SharedAwait {
    ThreadCtx* ctx;
    bool await_ready() { return false; }
    void await_suspend(std::coroutine_handle<> h) { ctx->current = h; }
    SharedRequest await_resume() { return ctx->req; }
};

SharedAwait read_next(ThreadCtx& c, int n) {
    c.req = SharedRequest{};
    c.req.kind = SharedRequest::Kind::ReadNext;
    c.req.node = n;
    return SharedAwait{&c};
}

SharedAwait cas_next(ThreadCtx& c, int n, RefW expected, RefW desired) {
    c.req = SharedRequest{};
    c.req.kind = SharedRequest::Kind::CasNext;
    c.req.node = n;
    c.req.expected = expected;
    c.req.desired = desired;
    return SharedAwait{&c};
}

SharedAwait cas_fnext(ThreadCtx& c, int n, int desired) {
    c.req = SharedRequest{};
    c.req.kind = SharedRequest::Kind::CasFnext;
    c.req.node = n;
    c.req.fdesired = desired;
    return SharedAwait{&c};
}

SharedAwait read_ft(ThreadCtx& c) {
    c.req = SharedRequest{};
    c.req.kind = SharedRequest::Kind::ReadFt;
    return SharedAwait{&c};
}

SharedAwait write_ft(ThreadCtx& c, int v) {
    c.req = SharedRequest{};
    c.req.kind = SharedRequest::Kind::WriteFt;
    c.req.ft_desired = v;
    return SharedAwait{&c};
}

struct SearchResult {
    int l = -1;
    int r = -1;
};

/// Locate the first unmarked node with key >= k and its predecessor,
/// unlinking marked nodes on the way. A marked node the deleter has not
/// linked to the free list yet is stepped past instead (unlinking it there
/// would drop its flow to zero); the caller's CAS then fails and retries.
OpTask<SearchResult> search_op(ThreadCtx& ctx, std::int64_t k) {
    for (;;) {
        int l = ctx.sim->mh();
        int r = l;
        RefW n = (co_await read_next(ctx, r)).ref_out;
        bool restart = false;
        for (;;) {
            if (!n.mark && ctx.sim->key_of(r) >= k) break;
            if (n.mark) {
                if (n.target < 0)
                    throw ModelError("search: marked node " + ctx.sim->id_of(r) +
                                     " has no successor");
                if (ctx.sim->linked(r)) {
                    SharedRequest c =
                        co_await cas_next(ctx, l, RefW{r, false}, RefW{n.target, false});
                    if (!c.ok) {
                        restart = true;
                        break;
                    }
                }
                r = n.target;
            } else {
                if (n.target < 0)
                    throw ModelError("search: list ended before the tail sentinel");
                l = r;
                r = n.target;
            }
            n = (co_await read_next(ctx, r)).ref_out;
        }
        if (!restart) co_return SearchResult{l, r};
    }
}

OpTask<bool> search_only_op(ThreadCtx& ctx, std::int64_t k) {
    OpTask<SearchResult> walk = search_op(ctx, k);
    SearchResult sr = co_await walk;
    co_return ctx.sim->key_of(sr.r) == k;
}

OpTask<bool> insert_op(ThreadCtx& ctx, std::int64_t k) {
    int fresh = ctx.sim->alloc_private(k);
    for (;;) {
        OpTask<SearchResult> walk = search_op(ctx, k);
        SearchResult sr = co_await walk;
        if (ctx.sim->key_of(sr.r) == k) {
            ctx.sim->free_private(fresh); // never published
            co_return false;
        }
        ctx.sim->set_private_next(fresh, RefW{sr.r, false});
        SharedRequest c = co_await cas_next(ctx, sr.l, RefW{sr.r, false}, RefW{fresh, false});
        if (c.ok) co_return true;
    }
}

OpTask<bool> delete_op(ThreadCtx& ctx, std::int64_t k) {
    int l = -1, r = -1;
    RefW succ;
    for (;;) {
        OpTask<SearchResult> walk = search_op(ctx, k);
        SearchResult sr = co_await walk;
        l = sr.l;
        r = sr.r;
        if (ctx.sim->key_of(r) != k) co_return false;
        succ = (co_await read_next(ctx, r)).ref_out;
        if (succ.mark) continue; // another deleter owns r; retry via search
        SharedRequest m = co_await cas_next(ctx, r, RefW{succ.target, false}, RefW{succ.target, true});
        if (m.ok) break;
    }
    // Put r on the free list before unlinking it, so its flow never drops
    // to zero between the two writes.
    for (;;) {
        int t = (co_await read_ft(ctx)).ft_out;
        SharedRequest c = co_await cas_fnext(ctx, t, r);
        if (c.ok) break;
    }
    co_await write_ft(ctx, r);
    // One unlink attempt; search cleanup finishes the job if it fails.
    co_await cas_next(ctx, l, RefW{r, false}, succ);
    co_return true;
}

} // namespace

struct HarrisSim::Impl {
    struct Slot {
        ThreadCtx ctx;
        std::optional<OpTask<bool>> task;
        HarrisOpKind op = HarrisOpKind::Search;
        std::optional<bool> last_result;
    };

    HarrisHeap heap;
    SimCore core;
    Rng rng;
    std::vector<std::unique_ptr<Slot>> slots;
    std::set<std::int64_t> expected_keys;
    int steps = 0;
    int completed = 0;

    Impl(HarrisHeap initial, std::uint64_t seed, int threads)
        : heap(std::move(initial)), rng(seed) {
        core.heap = &heap;
        for (int i = 0; i < threads; ++i) {
            auto s = std::make_unique<Slot>();
            s->ctx.sim = &core;
            slots.push_back(std::move(s));
        }
        // Nodes already on the free list count as linked.
        std::set<NodeId> seen;
        std::optional<NodeId> cur = heap.fh;
        while (cur && seen.insert(*cur).second && heap.nodes.count(*cur)) {
            core.ever_linked.insert(core.handle(*cur));
            cur = heap.nodes.at(*cur).fnext;
        }
        expected_keys = abstract_keys();
    }

    std::set<std::int64_t> abstract_keys() const {
        std::set<std::int64_t> ks;
        std::set<NodeId> seen;
        std::optional<NodeId> cur = heap.mh;
        while (cur && seen.insert(*cur).second && heap.nodes.count(*cur)) {
            const HarrisNode& n = heap.nodes.at(*cur);
            if (!n.next.mark && n.key != kKeyMin && n.key != kKeyMax) ks.insert(n.key);
            cur = n.next.target;
        }
        return ks;
    }

    void finish_if_done(Slot& s) {
        if (!s.task || !s.task->h.done()) return;
        auto& p = s.task->h.promise();
        if (p.exc) std::rethrow_exception(p.exc);
        bool res = *p.value;
        int want_inserts = (s.op == HarrisOpKind::Insert && res) ? 1 : 0;
        int want_marks = (s.op == HarrisOpKind::Delete && res) ? 1 : 0;
        if (s.ctx.inserts_seen != want_inserts)
            throw ModelError("operation finished with " + std::to_string(s.ctx.inserts_seen) +
                             " Insert actions, expected " + std::to_string(want_inserts));
        if (s.ctx.marks_seen != want_marks)
            throw ModelError("operation finished with " + std::to_string(s.ctx.marks_seen) +
                             " Mark actions, expected " + std::to_string(want_marks));
        s.last_result = res;
        s.task.reset();
        ++completed;
    }

    void spawn(int thread, HarrisOpKind op, std::int64_t key) {
        Slot& s = *slots.at(static_cast<size_t>(thread));
        if (s.task) throw InputError("spawn: thread " + std::to_string(thread) + " is busy");
        s.op = op;
        s.ctx.inserts_seen = 0;
        s.ctx.marks_seen = 0;
        s.ctx.req = SharedRequest{};
        switch (op) {
        case HarrisOpKind::Insert:
            s.task.emplace(insert_op(s.ctx, key));
            break;
        case HarrisOpKind::Delete:
            s.task.emplace(delete_op(s.ctx, key));
            break;
        case HarrisOpKind::Search:
            s.task.emplace(search_only_op(s.ctx, key));
            break;
        }
        s.ctx.current = s.task->h;
        s.task->h.resume(); // run the local prefix up to the first shared access
        finish_if_done(s);
    }

    HarrisStepRecord step() {
        std::vector<int> runnable;
        for (size_t i = 0; i < slots.size(); ++i)
            if (slots[i]->task) runnable.push_back(static_cast<int>(i));
        if (runnable.empty()) throw InputError("step: no runnable thread");
        int chosen = runnable[rng.below(runnable.size())];
        Slot& s = *slots[static_cast<size_t>(chosen)];

        HarrisStepRecord rec;
        rec.step = ++steps;
        rec.thread = chosen;

        HarrisHeap pre = heap;
        rec.changed_shared = core.apply(s.ctx.req);
        if (rec.changed_shared) {
            HarrisAction act = classify_action(pre, heap);
            if (!act.side_condition_failure.empty())
                throw ModelError("step " + std::to_string(rec.step) + ": " +
                                 act.side_condition_failure);
            rec.action = act.kind;
            rec.touched = act.touched;
            if (act.kind == HarrisActionKind::Insert) {
                ++s.ctx.inserts_seen;
                for (const auto& id : act.touched)
                    if (!pre.shared.count(id)) expected_keys.insert(heap.nodes.at(id).key);
            } else if (act.kind == HarrisActionKind::Mark) {
                ++s.ctx.marks_seen;
                expected_keys.erase(heap.nodes.at(*act.touched.begin()).key);
            }
            HarrisCheckReport chk = harris_check(heap);
            if (!chk.ok) {
                std::string msg;
                for (const auto& v : chk.violations) msg += (msg.empty() ? "" : "; ") + v;
                throw ModelError("step " + std::to_string(rec.step) + ": " + msg);
            }
            if (abstract_keys() != expected_keys)
                throw ModelError("step " + std::to_string(rec.step) +
                                 ": abstract key set diverged from the Insert/Mark history");
        }

        s.ctx.current.resume();
        finish_if_done(s);
        return rec;
    }
};

HarrisSim::HarrisSim(HarrisHeap initial, std::uint64_t seed, int threads)
    : impl_(std::make_unique<Impl>(std::move(initial), seed, threads)) {
    if (threads < 1) throw InputError("HarrisSim: threads must be >= 1");
}

HarrisSim::~HarrisSim() = default;
HarrisSim::HarrisSim(HarrisSim&&) noexcept = default;
HarrisSim& HarrisSim::operator=(HarrisSim&&) noexcept = default;

int HarrisSim::threads() const { return static_cast<int>(impl_->slots.size()); }

bool HarrisSim::idle(int thread) const {
    return !impl_->slots.at(static_cast<size_t>(thread))->task.has_value();
}

void HarrisSim::spawn(int thread, HarrisOpKind op, std::int64_t key) {
    impl_->spawn(thread, op, key);
}

bool HarrisSim::runnable() const {
    for (const auto& s : impl_->slots)
        if (s->task) return true;
    return false;
}

HarrisStepRecord HarrisSim::step() { return impl_->step(); }

const HarrisHeap& HarrisSim::heap() const { return impl_->heap; }

const std::set<std::int64_t>& HarrisSim::keys() const { return impl_->expected_keys; }

std::optional<bool> HarrisSim::last_result(int thread) const {
    return impl_->slots.at(static_cast<size_t>(thread))->last_result;
}

int HarrisSim::steps_taken() const { return impl_->steps; }
int HarrisSim::ops_completed() const { return impl_->completed; }

HarrisRunReport run_simulation(std::uint64_t seed, int threads, int ops, std::int64_t key_range) {
    if (threads < 1) throw InputError("run_simulation: threads must be >= 1");
    if (ops < 0) throw InputError("run_simulation: ops must be >= 0");
    if (key_range < 1) throw InputError("run_simulation: key_range must be >= 1");

    HarrisRunReport rep;
    Rng root(seed);
    Rng mix = root.fork(1);
    HarrisSim sim(harris_initial_heap(), root.next(), threads);
    const int step_cap = 1000 * (ops + 1);
    int spawned = 0;

    try {
        for (;;) {
            for (int t = 0; t < threads && spawned < ops; ++t) {
                if (!sim.idle(t)) continue;
                ++spawned;
                std::uint64_t pick = mix.below(10);
                auto key = static_cast<std::int64_t>(mix.below(static_cast<std::uint64_t>(key_range)));
                HarrisOpKind op = pick < 4   ? HarrisOpKind::Insert
                                  : pick < 7 ? HarrisOpKind::Delete
                                             : HarrisOpKind::Search;
                sim.spawn(t, op, key);
            }
            if (!sim.runnable()) break;
            if (sim.steps_taken() >= step_cap)
                throw ModelError("run_simulation: step budget exhausted (" +
                                 std::to_string(step_cap) + ")");
            HarrisStepRecord rec = sim.step();
            rep.action_counts[harris_action_name(rec.action)]++;
            rep.trace.push_back(std::move(rec));
        }
    } catch (const std::exception& e) {
        rep.ok = false;
        rep.failure = e.what();
    }
    rep.steps = sim.steps_taken();
    rep.ops_completed = sim.ops_completed();
    rep.final_keys = sim.keys();
    return rep;
}

Json harris_report_to_json(const HarrisRunReport& r) {
    Json j;
    j["ok"] = r.ok;
    if (!r.ok) j["failure"] = r.failure;
    j["steps"] = r.steps;
    j["ops_completed"] = r.ops_completed;
    j["action_counts"] = Json::object();
    for (const auto& [name, count] : r.action_counts) j["action_counts"][name] = count;
    j["final_keys"] = Json::array();
    for (std::int64_t k : r.final_keys) j["final_keys"].push_back(k);
    j["trace"] = Json::array();
    for (const auto& rec : r.trace) {
        Json t;
        t["step"] = rec.step;
        t["thread"] = rec.thread;
        t["action"] = harris_action_name(rec.action);
        t["touched"] = Json::array();
        for (const auto& id : rec.touched) t["touched"].push_back(id);
        t["checks"] = rec.changed_shared ? "pass" : "skipped";
        j["trace"].push_back(std::move(t));
    }
    return j;
}

} // namespace flow
