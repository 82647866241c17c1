#pragma once

#include "flow/extension.hpp"
#include "flow/json_io.hpp"

#include <memory>

namespace flow {

/// A next pointer with its deletion mark. The mark rides on the reference,
/// so one CAS covers both target and mark.
struct TaggedRef {
    std::optional<NodeId> target;
    bool mark = false;

    friend bool operator==(const TaggedRef&, const TaggedRef&) = default;
};

struct HarrisNode {
    std::int64_t key = 0; // INT64_MIN / INT64_MAX at the sentinels
    TaggedRef next;
    std::optional<NodeId> fnext;

    friend bool operator==(const HarrisNode&, const HarrisNode&) = default;
};

/// Shared state of the simulated list: the heap, the three roots, and the
/// set X of nodes that are visible to all threads. Nodes outside `shared`
/// are private to the thread that allocated them.
struct HarrisHeap {
    std::map<NodeId, HarrisNode> nodes;
    NodeId mh; // main-list head node
    NodeId fh; // free-list head node
    NodeId ft; // free-list tail root, advanced after each Link
    std::set<NodeId> shared;

    friend bool operator==(const HarrisHeap&, const HarrisHeap&) = default;
};

/// Product path-count abstraction over the shared nodes: next-only edges
/// scale by (1,0), fnext-only by (0,1), coinciding targets by the identity.
/// Inflow (1,0) at mh and (0,1) at fh. Returns the graph together with its
/// flow, solved by the capacity strategy (verified, effectively acyclic).
/// Failure to solve is a ModelError: the heap no longer abstracts.
std::pair<Graph, FlowAssignment> harris_abstract(const HarrisHeap& h);

/// Same abstraction packaged as a flow graph.
FlowGraph harris_flow_graph(const HarrisHeap& h);

struct HarrisCheckReport {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Full invariant sweep: valid flow graph, EA, γ per node (flow within
/// {(1,0),(0,1),(1,1)}, non-(1,0) implies marked, ft has free flow,
/// unmarked implies fnext null), φ (closed but for the two root inflows),
/// and the list-shape facts: both lists null-terminated and cycle-free,
/// free-node next edges stay inside the node set, ft on the free list,
/// free nodes marked.
HarrisCheckReport harris_check(const HarrisHeap& h);

enum class HarrisActionKind { Insert, Mark, Link, Unlink, LocalOnly };

std::string harris_action_name(HarrisActionKind k);

struct HarrisAction {
    HarrisActionKind kind = HarrisActionKind::LocalOnly;
    std::set<NodeId> touched;
    std::string side_condition_failure; // empty when the side condition holds
};

/// Match a one-access heap diff against the four shared actions and verify
/// the action's interface side condition (contextual extension plus subflow
/// preservation for Insert, pairwise interface equality for the others).
/// ModelError if the diff fits none of them.
HarrisAction classify_action(const HarrisHeap& pre, const HarrisHeap& post);

/// Two sentinels plus a marked free-list seed node (the free list is never
/// empty, mirroring the drained shape the listings assume).
HarrisHeap harris_initial_heap();

/// A worked mid-execution state: main list -inf,3,5,9,10,12,+inf with 5 and
/// 10 marked; free list 2,6,1,7,5,10 with ft = 10, so 5 and 10 live on both
/// lists at once.
HarrisHeap harris_example_heap();

struct HarrisStepRecord {
    int step = 0;
    int thread = 0;
    HarrisActionKind action = HarrisActionKind::LocalOnly;
    std::set<NodeId> touched;
    bool changed_shared = false;
};

enum class HarrisOpKind { Insert, Delete, Search };

/// A live simulation: the shared heap plus a fixed table of thread slots.
/// Thread procedures are transcriptions of the list's search, insert, and
/// delete, run as coroutines that suspend at every shared-heap access, so
/// one step is exactly one atomic read, write, or CAS. After each step that
/// changed shared state, the diff is classified, its interface side
/// condition is verified, harris_check runs, and the abstract key set is
/// compared against the Insert/Mark bookkeeping; any breach is a ModelError.
class HarrisSim {
  public:
    HarrisSim(HarrisHeap initial, std::uint64_t seed, int threads);
    ~HarrisSim();
    HarrisSim(HarrisSim&&) noexcept;
    HarrisSim& operator=(HarrisSim&&) noexcept;
    HarrisSim(const HarrisSim&) = delete;
    HarrisSim& operator=(const HarrisSim&) = delete;

    int threads() const;
    bool idle(int thread) const;

    /// Start one operation on an idle thread slot.
    void spawn(int thread, HarrisOpKind op, std::int64_t key);

    /// True while some thread has an operation in flight.
    bool runnable() const;

    /// Run one shared access on a seeded random runnable thread.
    HarrisStepRecord step();

    const HarrisHeap& heap() const;

    /// The abstract key set: keys of unmarked main-list nodes.
    const std::set<std::int64_t>& keys() const;

    /// Outcome of the last operation completed on the slot.
    std::optional<bool> last_result(int thread) const;

    int steps_taken() const;
    int ops_completed() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct HarrisRunReport {
    bool ok = true;
    std::string failure;
    int steps = 0;
    int ops_completed = 0;
    std::map<std::string, int> action_counts;
    std::set<std::int64_t> final_keys;
    std::vector<HarrisStepRecord> trace;
};

/// Deterministic interleaving soak: `threads` slots run a seeded mix of
/// insert/delete/search over keys in [0, key_range) until `ops` operations
/// complete. A check failure aborts the run and lands in the report rather
/// than propagating.
HarrisRunReport run_simulation(std::uint64_t seed, int threads, int ops, std::int64_t key_range);

Json harris_report_to_json(const HarrisRunReport& r);

} // namespace flow
