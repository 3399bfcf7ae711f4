#include "mvbm/solver.hpp"

#include <algorithm>

namespace mvbm {

namespace {

void require_valid(const Instance& inst, const char* who) {
    auto violations = validate_instance(inst);
    if (!violations.empty())
        throw Error(std::string(who) + ": invalid instance (" + to_string(violations.front().kind) +
                    " at " + violations.front().where + ")");
}

// Shared scratch for one path search.
struct SearchMarks {
    std::vector<char> agent_seen;
    std::vector<char> task_seen;
    std::vector<TaskId> via_task;   // agent -> task it was reached from
    std::vector<AgentId> via_agent; // task -> agent whose matched edge reached it

    explicit SearchMarks(const Instance& inst)
        : agent_seen(inst.num_agents(), 0), task_seen(inst.num_tasks(), 0),
          via_task(inst.num_agents(), -1), via_agent(inst.num_tasks(), -1) {}
};

AugmentingPath unwind(const SearchMarks& marks, TaskId start, AgentId terminal) {
    AugmentingPath path;
    AgentId a = terminal;
    TaskId t = marks.via_task[a];
    path.edges.push_back({a, t});
    while (t != start) {
        a = marks.via_agent[t];
        path.edges.push_back({a, t});
        t = marks.via_task[a];
        path.edges.push_back({a, t});
    }
    std::reverse(path.edges.begin(), path.edges.end());
    return path;
}

std::optional<AugmentingPath> breadth_first(const PartialMatching& pm, TaskId start) {
    const Instance& inst = pm.instance();
    SearchMarks marks(inst);
    std::vector<TaskId> frontier{start};
    marks.task_seen[start] = 1;
    std::vector<AgentId> layer;

    while (!frontier.empty()) {
        layer.clear();
        for (TaskId t : frontier) {
            for (AgentId a : inst.task_agents(t)) {
                if (marks.agent_seen[a]) continue;
                marks.agent_seen[a] = 1;
                marks.via_task[a] = t;
                layer.push_back(a);
            }
        }
        if (layer.empty()) return std::nullopt;
        std::sort(layer.begin(), layer.end());
        for (AgentId a : layer)
            if (!pm.saturated(a)) return unwind(marks, start, a);

        frontier.clear();
        for (AgentId a : layer) {
            for (TaskId held : pm.held(a)) {
                if (marks.task_seen[held]) continue;
                marks.task_seen[held] = 1;
                marks.via_agent[held] = a;
                frontier.push_back(held);
            }
        }
    }
    return std::nullopt;
}

bool depth_first_from(const PartialMatching& pm, SearchMarks& marks, TaskId t, AgentId& terminal) {
    const Instance& inst = pm.instance();
    for (AgentId a : inst.task_agents(t)) {
        if (marks.agent_seen[a]) continue;
        marks.agent_seen[a] = 1;
        marks.via_task[a] = t;
        if (!pm.saturated(a)) {
            terminal = a;
            return true;
        }
        for (TaskId held : pm.held(a)) {
            if (marks.task_seen[held]) continue;
            marks.task_seen[held] = 1;
            marks.via_agent[held] = a;
            if (depth_first_from(pm, marks, held, terminal)) return true;
        }
    }
    return false;
}

std::optional<AugmentingPath> depth_first(const PartialMatching& pm, TaskId start) {
    SearchMarks marks(pm.instance());
    marks.task_seen[start] = 1;
    AgentId terminal = -1;
    if (!depth_first_from(pm, marks, start, terminal)) return std::nullopt;
    return unwind(marks, start, terminal);
}

} // namespace

PartialMatching::PartialMatching(const Instance& inst)
    : inst_(&inst), owner_(inst.num_tasks(), -1), held_(inst.num_agents()) {}

PartialMatching::PartialMatching(const Instance& inst, const Matching& mu) : PartialMatching(inst) {
    if (!is_feasible_matching(inst, mu)) throw Error("PartialMatching: infeasible matching");
    for (const Edge& e : mu.pairs()) {
        owner_[e.task] = e.agent;
        held_[e.agent].push_back(e.task);
    }
    for (auto& tasks : held_) {
        std::sort(tasks.begin(), tasks.end(),
                  [&inst](TaskId x, TaskId y) { return inst.task_rank(x) < inst.task_rank(y); });
    }
}

void PartialMatching::augment(const AugmentingPath& path) {
    // Edges at even positions enter the matching, odd positions leave it.
    const auto& e = path.edges;
    for (std::size_t k = 0; k < e.size(); k += 2) {
        AgentId a = e[k].agent;
        TaskId gained = e[k].task;
        if (k + 1 < e.size()) {
            TaskId released = e[k + 1].task;
            auto& tasks = held_[a];
            tasks.erase(std::find(tasks.begin(), tasks.end(), released));
        }
        held_[a].push_back(gained);
        owner_[gained] = a;
    }
}

Matching PartialMatching::to_matching() const {
    std::vector<Edge> pairs;
    for (std::size_t t = 0; t < owner_.size(); ++t)
        if (owner_[t] >= 0) pairs.push_back({owner_[t], static_cast<TaskId>(t)});
    return Matching(std::move(pairs));
}

std::optional<AugmentingPath> find_augmenting_path(const PartialMatching& partial, TaskId t,
                                                   Traversal trav) {
    if (!partial.instance().task_in_range(t)) throw Error("find_augmenting_path: unknown task");
    if (partial.is_matched(t)) throw Error("find_augmenting_path: task already matched");
    return trav == Traversal::BreadthFirst ? breadth_first(partial, t) : depth_first(partial, t);
}

std::optional<AugmentingPath> find_augmenting_path(const Instance& inst, const Matching& partial,
                                                   TaskId t, Traversal trav) {
    PartialMatching pm(inst, partial);
    return find_augmenting_path(pm, t, trav);
}

std::vector<Matching> solve_mvbm_steps(const Instance& inst, Traversal trav) {
    require_valid(inst, "solve_mvbm");
    PartialMatching pm(inst);
    std::vector<Matching> steps{pm.to_matching()};
    for (TaskId t : inst.task_order()) {
        if (auto path = find_augmenting_path(pm, t, trav)) pm.augment(*path);
        steps.push_back(pm.to_matching());
    }
    return steps;
}

Matching solve_mvbm(const Instance& inst, Traversal trav) {
    require_valid(inst, "solve_mvbm");
    PartialMatching pm(inst);
    for (TaskId t : inst.task_order()) {
        if (auto path = find_augmenting_path(pm, t, trav)) pm.augment(*path);
    }
    return pm.to_matching();
}

Matching solve_ap(const Instance& inst) {
    require_valid(inst, "solve_ap");
    std::vector<int> load(inst.num_agents(), 0);
    std::vector<Edge> pairs;
    for (TaskId t : inst.task_order()) {
        for (AgentId a : inst.task_agents(t)) {
            if (load[a] < inst.capacity(a)) {
                ++load[a];
                pairs.push_back({a, t});
                break;
            }
        }
    }
    return Matching(std::move(pairs));
}

} // namespace mvbm
