#pragma once

// Exact MVbM by successive augmenting paths, plus the length-1 greedy
// approximation.
//
// Tasks are processed in decreasing value. For each task the solver looks for
// an alternating path that starts at the task and ends at an unsaturated
// agent, and flips it. Which path is found depends on the traversal, and that
// choice decides who gets what, so both traversals are pinned down exactly:
//
//  * BreadthFirst: layered search. Each layer is the set of agents first
//    reached at that depth. If the layer holds an unsaturated agent, the one
//    with the lowest id terminates the path. Otherwise the next layer is
//    reached through the held tasks of the layer's agents, visited in
//    increasing agent id and, per agent, in the order the tasks were matched.
//  * DepthFirst: adjacent agents in increasing id; a saturated agent is
//    recursed through its held tasks in the order they were matched before
//    the next sibling agent is tried.
//
// Agents and tasks are marked visited per search.

#include "mvbm/core.hpp"

#include <optional>
#include <vector>

namespace mvbm {

enum class Traversal { BreadthFirst, DepthFirst };

/// Alternating path from an unmatched task to an unsaturated agent:
/// (t0,a1) unmatched, (a1,t1) matched, (t1,a2) unmatched, ... ,(t_k,a_end).
struct AugmentingPath {
    std::vector<Edge> edges;

    std::size_t length() const { return edges.size(); }
    AgentId terminal_agent() const { return edges.back().agent; }
};

/// Mutable b-matching under construction. Remembers, per agent, the order in
/// which its current tasks were matched.
class PartialMatching {
public:
    explicit PartialMatching(const Instance& inst);
    /// Seeds the state from an edge set; each agent's tasks are taken in the
    /// task processing order. Throws Error if mu is infeasible.
    PartialMatching(const Instance& inst, const Matching& mu);

    const Instance& instance() const { return *inst_; }
    bool is_matched(TaskId t) const { return owner_[t] >= 0; }
    AgentId owner(TaskId t) const { return owner_[t]; }
    const std::vector<TaskId>& held(AgentId a) const { return held_[a]; }
    bool saturated(AgentId a) const {
        return static_cast<int>(held_[a].size()) >= inst_->capacity(a);
    }

    void augment(const AugmentingPath& path);
    Matching to_matching() const;

private:
    const Instance* inst_;
    std::vector<AgentId> owner_;
    std::vector<std::vector<TaskId>> held_;
};

std::optional<AugmentingPath> find_augmenting_path(const PartialMatching& partial, TaskId t,
                                                   Traversal trav);

/// Convenience overload over an edge set. Throws Error if t is matched.
std::optional<AugmentingPath> find_augmenting_path(const Instance& inst, const Matching& partial,
                                                   TaskId t, Traversal trav);

/// Maximum-weight b-matching. Throws Error on an invalid instance.
Matching solve_mvbm(const Instance& inst, Traversal trav);

/// The sequence mu_0 = {}, mu_1, ..., mu_m of intermediate matchings, one per
/// processed task.
std::vector<Matching> solve_mvbm_steps(const Instance& inst, Traversal trav);

/// Length-1 paths only: each task, in processing order, goes to the
/// lowest-id unsaturated adjacent agent, if any.
Matching solve_ap(const Instance& inst);

} // namespace mvbm
