#include "mvbm/mechanisms.hpp"

#include "mvbm/solver.hpp"

#include <algorithm>
#include <numeric>

namespace mvbm {

std::string to_string(MechanismKind kind) {
    switch (kind) {
    case MechanismKind::MBFS: return "bfs";
    case MechanismKind::MDFS: return "dfs";
    case MechanismKind::MAP: return "ap";
    case MechanismKind::MrBFS: return "rbfs";
    }
    return "?";
}

MechanismKind mechanism_from_string(const std::string& name) {
    if (name == "bfs") return MechanismKind::MBFS;
    if (name == "dfs") return MechanismKind::MDFS;
    if (name == "ap") return MechanismKind::MAP;
    if (name == "rbfs") return MechanismKind::MrBFS;
    throw Error("unknown mechanism '" + name + "'");
}

bool is_deterministic(MechanismKind kind) { return kind != MechanismKind::MrBFS; }

Profile Profile::truthful_agents(std::shared_ptr<const Instance> base) {
    Profile p;
    p.side = Side::Agents;
    p.agent_reports.resize(base->num_agents());
    p.base = std::move(base);
    return p;
}

Profile Profile::truthful_agents(const Instance& base) {
    return truthful_agents(std::make_shared<const Instance>(base));
}

Profile Profile::truthful_tasks(std::shared_ptr<const Instance> base) {
    Profile p;
    p.side = Side::Tasks;
    p.task_reports.resize(base->num_tasks());
    p.base = std::move(base);
    return p;
}

Profile Profile::truthful_tasks(const Instance& base) {
    return truthful_tasks(std::make_shared<const Instance>(base));
}

namespace {

template <class Ids>
void check_unique(Ids ids, const std::string& who) {
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw Error(who + ": duplicate edge in report");
}

} // namespace

void validate_profile(const Profile& profile) {
    if (!profile.base) throw Error("profile has no base instance");
    const Instance& inst = *profile.base;
    if (profile.side == Side::Agents) {
        if (profile.agent_reports.size() != inst.num_agents())
            throw Error("profile: agent report count does not match the market");
        for (std::size_t a = 0; a < inst.num_agents(); ++a) {
            const auto& r = profile.agent_reports[a];
            if (!r) continue;
            const std::string who = "report of agent " + std::to_string(a);
            for (TaskId t : r->edges)
                if (!inst.has_edge(static_cast<AgentId>(a), t))
                    throw Error(who + ": edge to t" + std::to_string(t) + " does not exist");
            check_unique(r->edges, who);
            if (r->capacity && (*r->capacity < 1 || *r->capacity > inst.capacity(static_cast<AgentId>(a))))
                throw Error(who + ": capacity outside [1, true capacity]");
        }
    } else {
        if (profile.task_reports.size() != inst.num_tasks())
            throw Error("profile: task report count does not match the market");
        for (std::size_t t = 0; t < inst.num_tasks(); ++t) {
            const auto& r = profile.task_reports[t];
            if (!r) continue;
            const std::string who = "report of task " + std::to_string(t);
            if (r->edges.empty()) throw Error(who + ": empty edge set");
            for (AgentId a : r->edges)
                if (!inst.has_edge(a, static_cast<TaskId>(t)))
                    throw Error(who + ": edge to a" + std::to_string(a) + " does not exist");
            check_unique(r->edges, who);
            if (r->value && !(*r->value > 0.0 && *r->value <= inst.value(static_cast<TaskId>(t))))
                throw Error(who + ": value outside (0, true value]");
        }
    }
}

Instance build_effective_instance(const Profile& profile) {
    validate_profile(profile);
    const Instance& inst = *profile.base;
    std::vector<int> caps = inst.capacities();
    std::vector<double> values = inst.values();
    std::vector<Edge> edges;
    edges.reserve(inst.num_edges());

    if (profile.side == Side::Agents) {
        for (std::size_t i = 0; i < inst.num_agents(); ++i) {
            const auto a = static_cast<AgentId>(i);
            const auto& r = profile.agent_reports[i];
            if (r && r->capacity) caps[i] = *r->capacity;
            if (r) {
                for (TaskId t : r->edges) edges.push_back({a, t});
            } else {
                for (TaskId t : inst.agent_tasks(a)) edges.push_back({a, t});
            }
        }
    } else {
        for (std::size_t j = 0; j < inst.num_tasks(); ++j) {
            const auto t = static_cast<TaskId>(j);
            const auto& r = profile.task_reports[j];
            if (r && r->value) values[j] = *r->value;
            if (r) {
                for (AgentId a : r->edges) edges.push_back({a, t});
            } else {
                for (AgentId a : inst.task_agents(t)) edges.push_back({a, t});
            }
        }
    }
    return Instance(std::move(caps), std::move(values), std::move(edges));
}

Instance permute_agents(const Instance& inst, std::span<const AgentId> order) {
    std::vector<int> caps(order.size());
    std::vector<Edge> edges;
    edges.reserve(inst.num_edges());
    for (std::size_t k = 0; k < order.size(); ++k) {
        caps[k] = inst.capacity(order[k]);
        for (TaskId t : inst.agent_tasks(order[k])) edges.push_back({static_cast<AgentId>(k), t});
    }
    return Instance(std::move(caps), inst.values(), std::move(edges));
}

Matching run_on_instance(MechanismKind kind, const Instance& reported, Rng* rng) {
    switch (kind) {
    case MechanismKind::MBFS: return solve_mvbm(reported, Traversal::BreadthFirst);
    case MechanismKind::MDFS: return solve_mvbm(reported, Traversal::DepthFirst);
    case MechanismKind::MAP: return solve_ap(reported);
    case MechanismKind::MrBFS: {
        if (rng == nullptr) throw Error("randomized mechanism requires an rng seed");
        std::vector<AgentId> order = sample_agent_order(reported, *rng);
        Matching relabeled = solve_mvbm(permute_agents(reported, order), Traversal::BreadthFirst);
        std::vector<Edge> pairs;
        pairs.reserve(relabeled.size());
        for (const Edge& e : relabeled.pairs()) pairs.push_back({order[e.agent], e.task});
        return Matching(std::move(pairs));
    }
    }
    throw Error("unknown mechanism");
}

Matching run_mechanism(MechanismKind kind, const Profile& profile,
                       std::optional<std::uint64_t> rng_seed) {
    if (kind == MechanismKind::MrBFS && !rng_seed)
        throw Error("run_mechanism: randomized mechanism requires an rng seed");
    Instance reported = build_effective_instance(profile);
    if (kind == MechanismKind::MrBFS) {
        Rng rng(*rng_seed);
        return run_on_instance(kind, reported, &rng);
    }
    return run_on_instance(kind, reported);
}

Matching FcfsPolicySet::as_matching() const {
    std::vector<Edge> pairs;
    for (std::size_t a = 0; a < policies.size(); ++a)
        for (TaskId t : policies[a]) pairs.push_back({static_cast<AgentId>(a), t});
    return Matching(std::move(pairs));
}

FcfsPolicySet fcfs_policies(const Instance& inst) {
    FcfsPolicySet out;
    out.policies.resize(inst.num_agents());
    std::vector<char> taken(inst.num_tasks(), 0);

    std::vector<TaskId> all(inst.num_tasks());
    std::iota(all.begin(), all.end(), 0);
    out.residual.push_back(all);

    for (std::size_t i = 0; i < inst.num_agents(); ++i) {
        const auto a = static_cast<AgentId>(i);
        std::vector<TaskId> open;
        for (TaskId t : inst.agent_tasks(a))
            if (!taken[t]) open.push_back(t);
        sort_by_task_order(inst, open);
        if (open.size() > static_cast<std::size_t>(inst.capacity(a))) open.resize(inst.capacity(a));
        for (TaskId t : open) taken[t] = 1;
        out.policies[i] = std::move(open);

        std::vector<TaskId> rest;
        for (TaskId t : out.residual.back())
            if (!taken[t]) rest.push_back(t);
        out.residual.push_back(std::move(rest));
    }
    return out;
}

WorstNe worst_ne_profile(const Instance& inst) {
    FcfsPolicySet fcfs = fcfs_policies(inst);
    WorstNe out{Profile::truthful_agents(inst), 0.0};
    for (std::size_t a = 0; a < inst.num_agents(); ++a) {
        std::vector<TaskId> edges = fcfs.policies[a];
        std::sort(edges.begin(), edges.end());
        out.profile.agent_reports[a] = AgentReport{std::move(edges), std::nullopt};
    }
    out.welfare = matching_weight(inst, fcfs.as_matching());
    return out;
}

std::vector<TaskId> top_valued_tasks(const Instance& inst, AgentId a) {
    std::vector<TaskId> tasks(inst.agent_tasks(a).begin(), inst.agent_tasks(a).end());
    sort_by_task_order(inst, tasks);
    if (tasks.size() > static_cast<std::size_t>(inst.capacity(a))) tasks.resize(inst.capacity(a));
    std::sort(tasks.begin(), tasks.end());
    return tasks;
}

std::vector<TaskId> first_agent_best_report(const Instance& inst) {
    if (inst.num_agents() == 0 || inst.degree(0) == 0)
        throw Error("first_agent_best_report: agent 0 has no edges");
    return top_valued_tasks(inst, 0);
}

std::vector<double> lottery_weights(const Instance& reported) {
    std::vector<double> w(reported.num_agents(), 0.0);
    for (std::size_t a = 0; a < reported.num_agents(); ++a)
        for (TaskId t : reported.agent_tasks(static_cast<AgentId>(a)))
            w[a] += 1.0 / (1.0 + reported.value(t));
    return w;
}

std::vector<AgentId> sample_agent_order(const Instance& reported, Rng& rng) {
    std::vector<double> w = lottery_weights(reported);
    std::vector<AgentId> remaining;
    std::vector<AgentId> zero;
    for (std::size_t a = 0; a < w.size(); ++a)
        (w[a] > 0.0 ? remaining : zero).push_back(static_cast<AgentId>(a));

    std::vector<AgentId> order;
    order.reserve(w.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (!remaining.empty()) {
        double total = 0.0;
        for (AgentId a : remaining) total += w[a];
        double u = unit(rng) * total;
        std::size_t pick = remaining.size() - 1;
        double acc = 0.0;
        for (std::size_t k = 0; k < remaining.size(); ++k) {
            acc += w[remaining[k]];
            if (u < acc) {
                pick = k;
                break;
            }
        }
        order.push_back(remaining[pick]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    order.insert(order.end(), zero.begin(), zero.end());
    return order;
}

std::vector<std::vector<double>> randomized_bfs_samples(const Profile& profile, std::size_t trials,
                                                        std::uint64_t seed) {
    if (trials == 0) throw Error("randomized_bfs: trials must be >= 1");
    const Instance& truth = profile.instance();
    Instance reported = build_effective_instance(profile);
    std::vector<std::vector<double>> samples(truth.num_agents(), std::vector<double>(trials, 0.0));
    for (std::size_t k = 0; k < trials; ++k) {
        Rng rng = make_rng(seed, {k});
        Matching mu = run_on_instance(MechanismKind::MrBFS, reported, &rng);
        for (const Edge& e : mu.pairs()) samples[e.agent][k] += truth.value(e.task);
    }
    return samples;
}

std::vector<double> run_randomized_bfs(const Profile& profile, std::size_t trials,
                                       std::uint64_t seed) {
    auto samples = randomized_bfs_samples(profile, trials, seed);
    std::vector<double> means;
    means.reserve(samples.size());
    for (const auto& s : samples) means.push_back(pairwise_sum(s) / static_cast<double>(trials));
    return means;
}

nlohmann::json profile_to_json(const Profile& profile) {
    using nlohmann::json;
    json reports = json::array();
    if (profile.side == Side::Agents) {
        for (const auto& r : profile.agent_reports) {
            if (!r) {
                reports.push_back(nullptr);
                continue;
            }
            json jr = {{"edges", r->edges}};
            if (r->capacity) jr["capacity"] = *r->capacity;
            reports.push_back(jr);
        }
    } else {
        for (const auto& r : profile.task_reports) {
            if (!r) {
                reports.push_back(nullptr);
                continue;
            }
            json jr = {{"edges", r->edges}};
            if (r->value) jr["value"] = *r->value;
            reports.push_back(jr);
        }
    }
    return {{"side", profile.side == Side::Agents ? "agents" : "tasks"}, {"reports", reports}};
}

Profile profile_from_json(const nlohmann::json& j, std::shared_ptr<const Instance> base) {
    try {
        const std::string side = j.at("side").get<std::string>();
        Profile p;
        if (side == "agents") {
            p = Profile::truthful_agents(std::move(base));
            const auto& reports = j.at("reports");
            if (reports.size() != p.agent_reports.size())
                throw Error("profile: agent report count does not match the market");
            for (std::size_t a = 0; a < reports.size(); ++a) {
                if (reports[a].is_null()) continue;
                AgentReport r;
                r.edges = reports[a].at("edges").get<std::vector<TaskId>>();
                std::sort(r.edges.begin(), r.edges.end());
                if (reports[a].contains("capacity")) r.capacity = reports[a]["capacity"].get<int>();
                p.agent_reports[a] = std::move(r);
            }
        } else if (side == "tasks") {
            p = Profile::truthful_tasks(std::move(base));
            const auto& reports = j.at("reports");
            if (reports.size() != p.task_reports.size())
                throw Error("profile: task report count does not match the market");
            for (std::size_t t = 0; t < reports.size(); ++t) {
                if (reports[t].is_null()) continue;
                TaskReport r;
                r.edges = reports[t].at("edges").get<std::vector<AgentId>>();
                std::sort(r.edges.begin(), r.edges.end());
                if (reports[t].contains("value")) r.value = reports[t]["value"].get<double>();
                p.task_reports[t] = std::move(r);
            }
        } else {
            throw Error("profile: side must be \"agents\" or \"tasks\"");
        }
        validate_profile(p);
        return p;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("malformed profile JSON: ") + ex.what());
    }
}

} // namespace mvbm
