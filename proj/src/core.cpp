#include "mvbm/core.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>

namespace mvbm {

std::string to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::AgentOutOfRange: return "agent id out of range";
    case ViolationKind::TaskOutOfRange: return "task id out of range";
    case ViolationKind::DuplicateEdge: return "duplicate edge";
    case ViolationKind::NonPositiveCapacity: return "non-positive capacity";
    case ViolationKind::NegativeValue: return "negative task value";
    case ViolationKind::NonFiniteValue: return "non-finite task value";
    }
    return "unknown";
}

namespace {

std::string edge_label(const Edge& e) {
    return "(a" + std::to_string(e.agent) + ",t" + std::to_string(e.task) + ")";
}

} // namespace

Instance::Instance(std::vector<int> capacities, std::vector<double> values,
                   std::vector<Edge> edges)
    : capacities_(std::move(capacities)), values_(std::move(values)) {
    agent_adj_.resize(capacities_.size());
    task_adj_.resize(values_.size());

    std::sort(edges.begin(), edges.end());
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const Edge& e = edges[k];
        if (!agent_in_range(e.agent)) {
            structural_.push_back({ViolationKind::AgentOutOfRange, "edge " + edge_label(e)});
            continue;
        }
        if (!task_in_range(e.task)) {
            structural_.push_back({ViolationKind::TaskOutOfRange, "edge " + edge_label(e)});
            continue;
        }
        if (k > 0 && edges[k - 1] == e) {
            structural_.push_back({ViolationKind::DuplicateEdge, "edge " + edge_label(e)});
            continue;
        }
        agent_adj_[e.agent].push_back(e.task);
        task_adj_[e.task].push_back(e.agent);
        ++num_edges_;
    }
    // Edges were visited in (agent, task) order, so agent lists are sorted and
    // task lists received agents in increasing id.

    order_.resize(values_.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [this](TaskId x, TaskId y) { return values_[x] > values_[y]; });
    rank_.resize(values_.size());
    for (std::size_t r = 0; r < order_.size(); ++r) rank_[order_[r]] = r;
}

bool Instance::has_edge(AgentId a, TaskId t) const {
    if (!agent_in_range(a)) return false;
    const auto& adj = agent_adj_[a];
    return std::binary_search(adj.begin(), adj.end(), t);
}

std::vector<Edge> Instance::edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges_);
    for (std::size_t a = 0; a < agent_adj_.size(); ++a)
        for (TaskId t : agent_adj_[a]) out.push_back({static_cast<AgentId>(a), t});
    return out;
}

void sort_by_task_order(const Instance& inst, std::vector<TaskId>& tasks) {
    std::sort(tasks.begin(), tasks.end(), [&inst](TaskId x, TaskId y) {
        return inst.task_rank(x) < inst.task_rank(y);
    });
}

Matching::Matching(std::vector<Edge> pairs) : pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

bool Matching::contains(Edge e) const {
    return std::binary_search(pairs_.begin(), pairs_.end(), e);
}

bool Matching::covers_task(TaskId t) const {
    return std::any_of(pairs_.begin(), pairs_.end(), [t](const Edge& e) { return e.task == t; });
}

std::vector<TaskId> Matching::tasks_of(AgentId a) const {
    std::vector<TaskId> out;
    auto lo = std::lower_bound(pairs_.begin(), pairs_.end(), Edge{a, std::numeric_limits<int>::min()});
    for (; lo != pairs_.end() && lo->agent == a; ++lo) out.push_back(lo->task);
    return out;
}

Matching Matching::symmetric_difference(const Matching& other) const {
    std::vector<Edge> out;
    std::set_symmetric_difference(pairs_.begin(), pairs_.end(), other.pairs_.begin(),
                                  other.pairs_.end(), std::back_inserter(out));
    return Matching(std::move(out));
}

std::vector<Violation> validate_instance(const Instance& inst) {
    std::vector<Violation> out = inst.structural_violations();
    for (std::size_t a = 0; a < inst.num_agents(); ++a) {
        if (inst.capacity(static_cast<AgentId>(a)) < 1)
            out.push_back({ViolationKind::NonPositiveCapacity, "agent a" + std::to_string(a)});
    }
    for (std::size_t t = 0; t < inst.num_tasks(); ++t) {
        double q = inst.value(static_cast<TaskId>(t));
        if (!std::isfinite(q))
            out.push_back({ViolationKind::NonFiniteValue, "task t" + std::to_string(t)});
        else if (q < 0.0)
            out.push_back({ViolationKind::NegativeValue, "task t" + std::to_string(t)});
    }
    return out;
}

bool is_feasible_matching(const Instance& inst, const Matching& mu) {
    std::vector<int> load(inst.num_agents(), 0);
    std::vector<char> taken(inst.num_tasks(), 0);
    for (const Edge& e : mu.pairs()) {
        if (!inst.has_edge(e.agent, e.task)) return false;
        if (taken[e.task]) return false;
        taken[e.task] = 1;
        if (++load[e.agent] > inst.capacity(e.agent)) return false;
    }
    return true;
}

double matching_weight(const Instance& inst, const Matching& mu) {
    if (!is_feasible_matching(inst, mu)) throw Error("matching_weight: infeasible matching");
    double w = 0.0;
    for (const Edge& e : mu.pairs()) w += inst.value(e.task);
    return w;
}

double agent_utility(const Instance& inst, const Matching& mu, AgentId a) {
    if (!inst.agent_in_range(a)) throw Error("agent_utility: unknown agent " + std::to_string(a));
    double w = 0.0;
    for (const Edge& e : mu.pairs())
        if (e.agent == a) w += inst.value(e.task);
    return w;
}

std::vector<double> agent_utilities(const Instance& inst, const Matching& mu) {
    std::vector<double> out(inst.num_agents(), 0.0);
    for (const Edge& e : mu.pairs()) out[e.agent] += inst.value(e.task);
    return out;
}

int task_utility(const Matching& mu, TaskId t) { return mu.covers_task(t) ? 1 : 0; }

std::string format_matching(const Matching& mu) {
    std::vector<Edge> pairs = mu.pairs();
    std::sort(pairs.begin(), pairs.end(), [](const Edge& x, const Edge& y) {
        return x.task != y.task ? x.task < y.task : x.agent < y.agent;
    });
    std::string out = "{";
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (k) out += ",";
        out += "(a" + std::to_string(pairs[k].agent + 1) + ",t" + std::to_string(pairs[k].task + 1) + ")";
    }
    return out + "}";
}

} // namespace mvbm
