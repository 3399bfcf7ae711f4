#pragma once

// Domain types for the vertex-weighted bipartite b-matching market: agents
// with capacities on one side, valued tasks on the other.

#include <compare>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvbm {

using AgentId = int;
using TaskId = int;

// Absolute tolerance for every weight/utility comparison.
inline constexpr double kTolerance = 1e-9;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when an exhaustive routine would exceed its enumeration budget.
class CapExceeded : public Error {
public:
    using Error::Error;
};

struct Edge {
    AgentId agent = 0;
    TaskId task = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Agent {
    AgentId id = 0;
    int capacity = 1;
};

struct Task {
    TaskId id = 0;
    double value = 0.0;
};

enum class ViolationKind {
    AgentOutOfRange,
    TaskOutOfRange,
    DuplicateEdge,
    NonPositiveCapacity,
    NegativeValue,
    NonFiniteValue,
};

struct Violation {
    ViolationKind kind;
    std::string where;

    friend bool operator==(const Violation&, const Violation&) = default;
};

std::string to_string(ViolationKind kind);

/// Immutable bipartite market. Adjacency is normalized on construction:
/// per-agent task lists and per-task agent lists are sorted and deduplicated.
/// Malformed input (bad ids, duplicates, bad capacities) is retained as a
/// list of violations instead of throwing, so validate_instance can report
/// every breach.
class Instance {
public:
    Instance() = default;
    Instance(std::vector<int> capacities, std::vector<double> values,
             std::vector<Edge> edges);

    std::size_t num_agents() const { return capacities_.size(); }
    std::size_t num_tasks() const { return values_.size(); }
    std::size_t num_edges() const { return num_edges_; }
    std::size_t num_vertices() const { return num_agents() + num_tasks(); }

    int capacity(AgentId a) const { return capacities_[a]; }
    double value(TaskId t) const { return values_[t]; }
    const std::vector<int>& capacities() const { return capacities_; }
    const std::vector<double>& values() const { return values_; }

    Agent agent(AgentId a) const { return {a, capacities_[a]}; }
    Task task(TaskId t) const { return {t, values_[t]}; }

    /// Tasks adjacent to agent a, increasing id.
    std::span<const TaskId> agent_tasks(AgentId a) const { return agent_adj_[a]; }
    /// Agents adjacent to task t, increasing id (= priority order).
    std::span<const AgentId> task_agents(TaskId t) const { return task_adj_[t]; }
    std::size_t degree(AgentId a) const { return agent_adj_[a].size(); }

    bool has_edge(AgentId a, TaskId t) const;

    /// All edges sorted by (agent, task).
    std::vector<Edge> edges() const;

    /// Task processing order: decreasing value, ties by increasing id.
    std::span<const TaskId> task_order() const { return order_; }
    /// Position of each task within task_order().
    std::size_t task_rank(TaskId t) const { return rank_[t]; }

    bool agent_in_range(AgentId a) const {
        return a >= 0 && static_cast<std::size_t>(a) < num_agents();
    }
    bool task_in_range(TaskId t) const {
        return t >= 0 && static_cast<std::size_t>(t) < num_tasks();
    }

    const std::vector<Violation>& structural_violations() const { return structural_; }

    friend bool operator==(const Instance& lhs, const Instance& rhs) {
        return lhs.capacities_ == rhs.capacities_ && lhs.values_ == rhs.values_ &&
               lhs.agent_adj_ == rhs.agent_adj_;
    }

private:
    std::vector<int> capacities_;
    std::vector<double> values_;
    std::vector<std::vector<TaskId>> agent_adj_;
    std::vector<std::vector<AgentId>> task_adj_;
    std::vector<TaskId> order_;
    std::vector<std::size_t> rank_;
    std::vector<Violation> structural_;
    std::size_t num_edges_ = 0;
};

/// Sorts task ids in place by the processing order (decreasing value, ties
/// by increasing id).
void sort_by_task_order(const Instance& inst, std::vector<TaskId>& tasks);

/// A set of (agent, task) pairs. Stored sorted and deduplicated so set
/// algebra is plain sorted-range work.
class Matching {
public:
    Matching() = default;
    explicit Matching(std::vector<Edge> pairs);

    const std::vector<Edge>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    bool contains(Edge e) const;
    bool covers_task(TaskId t) const;
    std::vector<TaskId> tasks_of(AgentId a) const;

    Matching symmetric_difference(const Matching& other) const;

    friend bool operator==(const Matching&, const Matching&) = default;

private:
    std::vector<Edge> pairs_;
};

std::vector<Violation> validate_instance(const Instance& inst);

bool is_feasible_matching(const Instance& inst, const Matching& mu);

/// Total value of matched tasks. Throws Error on an infeasible matching.
double matching_weight(const Instance& inst, const Matching& mu);

double agent_utility(const Instance& inst, const Matching& mu, AgentId a);

/// Utility of every agent in one pass.
std::vector<double> agent_utilities(const Instance& inst, const Matching& mu);

/// 1 when t is matched, else 0.
int task_utility(const Matching& mu, TaskId t);

/// "{(a1,t1),(a2,t2)}" with 1-based labels, pairs ordered by task id.
std::string format_matching(const Matching& mu);

} // namespace mvbm
