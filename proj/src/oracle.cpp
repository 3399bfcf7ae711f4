#include "mvbm/oracle.hpp"

#include "mvbm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mvbm {

namespace {

struct BruteForce {
    const Instance& inst;
    std::vector<int> residual;
    std::vector<AgentId> assign;
    std::vector<AgentId> best_assign;
    double best = -1.0;
    std::size_t leaves = 0;

    void run(std::size_t t, double weight) {
        if (t == inst.num_tasks()) {
            ++leaves;
            if (weight > best + kTolerance) {
                best = weight;
                best_assign = assign;
            }
            return;
        }
        const auto task = static_cast<TaskId>(t);
        assign[t] = -1;
        run(t + 1, weight);
        for (AgentId a : inst.task_agents(task)) {
            if (residual[a] == 0) continue;
            --residual[a];
            assign[t] = a;
            run(t + 1, weight + inst.value(task));
            ++residual[a];
        }
        assign[t] = -1;
    }
};

double ratio_or_one(double num, double den) {
    if (den <= kTolerance) return num <= kTolerance ? 1.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

void require_deterministic(MechanismKind kind, const char* who) {
    if (!is_deterministic(kind)) throw Error(std::string(who) + ": mechanism must be deterministic");
}

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> combinations(int n, std::size_t k) {
    std::vector<std::vector<int>> out;
    if (k == 0 || k > static_cast<std::size_t>(n)) return out;
    std::vector<int> c(k);
    for (std::size_t i = 0; i < k; ++i) c[i] = static_cast<int>(i);
    while (true) {
        out.push_back(c);
        std::size_t i = k;
        while (i > 0 && c[i - 1] == n - static_cast<int>(k - i + 1)) --i;
        if (i == 0) break;
        ++c[i - 1];
        for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
    }
    return out;
}

// Advances a mixed-radix counter; false after the last combination.
bool next_index(std::vector<std::size_t>& idx, const std::vector<std::size_t>& radix) {
    for (std::size_t i = idx.size(); i-- > 0;) {
        if (++idx[i] < radix[i]) return true;
        idx[i] = 0;
    }
    return false;
}

double product_size(const std::vector<std::size_t>& radix) {
    double p = 1.0;
    for (std::size_t r : radix) p *= static_cast<double>(r);
    return p;
}

template <class Ids>
std::vector<std::vector<int>> strategy_set(Ids ids, const char* who) {
    if (ids.size() > kEnumerationDegreeCap)
        throw CapExceeded(std::string(who) + ": degree exceeds enumeration cap");
    return nonempty_subsets(ids);
}

} // namespace

OptimumCertificate brute_force_mvbm(const Instance& inst) {
    if (!validate_instance(inst).empty()) throw Error("brute_force_mvbm: invalid instance");
    if (inst.num_tasks() > kBruteForceMaxTasks)
        throw CapExceeded("brute_force_mvbm: more than " + std::to_string(kBruteForceMaxTasks) + " tasks");
    double space = 1.0;
    for (std::size_t t = 0; t < inst.num_tasks(); ++t)
        space *= static_cast<double>(inst.task_agents(static_cast<TaskId>(t)).size() + 1);
    if (space > kBruteForceMaxAssignments)
        throw CapExceeded("brute_force_mvbm: assignment space exceeds 1e7");

    BruteForce bf{inst, inst.capacities(), std::vector<AgentId>(inst.num_tasks(), -1), {}, -1.0, 0};
    bf.run(0, 0.0);

    OptimumCertificate cert;
    cert.enumerated = bf.leaves;
    std::vector<Edge> pairs;
    for (std::size_t t = 0; t < bf.best_assign.size(); ++t)
        if (bf.best_assign[t] >= 0) pairs.push_back({bf.best_assign[t], static_cast<TaskId>(t)});
    cert.matching = Matching(std::move(pairs));
    cert.weight = matching_weight(inst, cert.matching);
    return cert;
}

std::vector<Deviation> audit_agent_truthfulness(const Instance& inst, MechanismKind kind,
                                                Setting setting) {
    require_deterministic(kind, "audit_agent_truthfulness");
    if (setting == Setting::EVMS) throw Error("audit_agent_truthfulness: EVMS is a task-side setting");
    auto base = std::make_shared<const Instance>(inst);
    std::vector<double> truthful = agent_utilities(inst, run_on_instance(kind, inst));

    std::vector<Deviation> out;
    for (std::size_t i = 0; i < inst.num_agents(); ++i) {
        const auto a = static_cast<AgentId>(i);
        if (inst.degree(a) == 0) continue;
        auto subsets = strategy_set(inst.agent_tasks(a), "audit_agent_truthfulness");
        const int max_cap = setting == Setting::ECMS ? inst.capacity(a) : 1;
        Profile p = Profile::truthful_agents(base);
        for (auto& edges : subsets) {
            for (int c = 1; c <= max_cap; ++c) {
                AgentReport r{edges, std::nullopt};
                if (setting == Setting::ECMS) r.capacity = c;
                p.agent_reports[i] = r;
                double u = agent_utility(inst, run_mechanism(kind, p), a);
                if (u > truthful[i] + kTolerance) {
                    Deviation d;
                    d.entity = a;
                    d.edges = edges;
                    d.capacity = r.capacity;
                    d.truthful_utility = truthful[i];
                    d.deviant_utility = u;
                    out.push_back(std::move(d));
                }
            }
        }
    }
    return out;
}

std::vector<Deviation> audit_task_truthfulness(const Instance& inst, MechanismKind kind,
                                               Setting setting,
                                               const std::vector<double>& value_grid) {
    require_deterministic(kind, "audit_task_truthfulness");
    if (setting == Setting::ECMS) throw Error("audit_task_truthfulness: ECMS is an agent-side setting");
    std::vector<double> grid = setting == Setting::EVMS ? value_grid : std::vector<double>{};
    for (double f : grid)
        if (!(f > 0.0 && f <= 1.0)) throw Error("audit_task_truthfulness: grid fractions must lie in (0, 1]");
    auto base = std::make_shared<const Instance>(inst);
    Matching truthful = run_on_instance(kind, inst);

    std::vector<Deviation> out;
    for (std::size_t j = 0; j < inst.num_tasks(); ++j) {
        const auto t = static_cast<TaskId>(j);
        if (truthful.covers_task(t) || inst.task_agents(t).empty()) continue;
        auto subsets = strategy_set(inst.task_agents(t), "audit_task_truthfulness");
        Profile p = Profile::truthful_tasks(base);
        for (auto& edges : subsets) {
            std::vector<std::optional<double>> values;
            if (grid.empty()) values.push_back(std::nullopt);
            for (double f : grid) values.push_back(inst.value(t) * f);
            for (const auto& v : values) {
                if (v && *v <= 0.0) continue;
                p.task_reports[j] = TaskReport{edges, v};
                if (run_mechanism(kind, p).covers_task(t)) {
                    Deviation d;
                    d.entity = t;
                    d.edges = edges;
                    d.value = v;
                    d.truthful_utility = 0.0;
                    d.deviant_utility = 1.0;
                    out.push_back(std::move(d));
                }
            }
        }
    }
    return out;
}

nlohmann::json coalition_to_json(const Coalition& c) {
    return {{"members", c.members},
            {"reports", c.reports},
            {"truthful_utilities", c.truthful_utilities},
            {"deviant_utilities", c.deviant_utilities}};
}

namespace {

// Shared coalition search. `strategies(e)` lists e's reports, `apply` writes
// one into a profile, `utility(mu, e)` scores it.
template <class Strategies, class Apply, class Utility>
std::optional<Coalition> search_coalitions(int entities, std::size_t max_size, const Profile& truthful,
                                           MechanismKind kind, Strategies&& strategies, Apply&& apply,
                                           Utility&& utility) {
    Matching mu0 = run_mechanism(kind, truthful);
    for (std::size_t size = 1; size <= max_size; ++size) {
        for (const auto& members : combinations(entities, size)) {
            std::vector<std::vector<std::vector<int>>> sets;
            std::vector<std::size_t> radix;
            bool usable = true;
            for (int e : members) {
                sets.push_back(strategies(e));
                if (sets.back().empty()) usable = false;
                radix.push_back(sets.back().size());
            }
            if (!usable) continue;
            if (product_size(radix) > kMaxEnumeratedProfiles)
                throw CapExceeded("coalition search: joint report space exceeds 1e6");

            std::vector<double> before;
            for (int e : members) before.push_back(utility(mu0, e));

            std::vector<std::size_t> idx(members.size(), 0);
            do {
                Profile p = truthful;
                for (std::size_t k = 0; k < members.size(); ++k) apply(p, members[k], sets[k][idx[k]]);
                Matching mu = run_mechanism(kind, p);
                bool weak = true;
                bool strict = false;
                std::vector<double> after;
                for (std::size_t k = 0; k < members.size(); ++k) {
                    double u = utility(mu, members[k]);
                    after.push_back(u);
                    if (u < before[k] - kTolerance) weak = false;
                    if (u > before[k] + kTolerance) strict = true;
                }
                if (weak && strict) {
                    Coalition c;
                    c.members = members;
                    for (std::size_t k = 0; k < members.size(); ++k) c.reports.push_back(sets[k][idx[k]]);
                    c.truthful_utilities = before;
                    c.deviant_utilities = after;
                    return c;
                }
            } while (next_index(idx, radix));
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<Coalition> find_agent_coalition(const Instance& inst, MechanismKind kind,
                                              std::size_t max_size) {
    require_deterministic(kind, "find_agent_coalition");
    auto base = std::make_shared<const Instance>(inst);
    return search_coalitions(
        static_cast<int>(inst.num_agents()), max_size, Profile::truthful_agents(base), kind,
        [&](int a) {
            if (inst.degree(a) == 0) return std::vector<std::vector<int>>{};
            return strategy_set(inst.agent_tasks(a), "find_agent_coalition");
        },
        [](Profile& p, int a, const std::vector<int>& edges) { p.agent_reports[a] = AgentReport{edges, std::nullopt}; },
        [&](const Matching& mu, int a) { return agent_utility(inst, mu, a); });
}

std::optional<Coalition> find_task_coalition(const Instance& inst, MechanismKind kind,
                                             std::size_t max_size) {
    require_deterministic(kind, "find_task_coalition");
    auto base = std::make_shared<const Instance>(inst);
    return search_coalitions(
        static_cast<int>(inst.num_tasks()), max_size, Profile::truthful_tasks(base), kind,
        [&](int t) {
            if (inst.task_agents(t).empty()) return std::vector<std::vector<int>>{};
            return strategy_set(inst.task_agents(t), "find_task_coalition");
        },
        [](Profile& p, int t, const std::vector<int>& edges) { p.task_reports[t] = TaskReport{edges, std::nullopt}; },
        [](const Matching& mu, int t) { return static_cast<double>(task_utility(mu, t)); });
}

bool exact_nash_feasible(const Instance& inst) {
    if (inst.num_agents() > kExactNashMaxAgents) return false;
    for (std::size_t a = 0; a < inst.num_agents(); ++a)
        if (inst.degree(static_cast<AgentId>(a)) > kExactNashMaxDegree) return false;
    return true;
}

PoaPos poa_pos_on_instance(const Instance& inst, MechanismKind kind) {
    require_deterministic(kind, "poa_pos_on_instance");
    PoaPos out;
    out.optimum = matching_weight(inst, solve_mvbm(inst, Traversal::BreadthFirst));

    if (!exact_nash_feasible(inst)) {
        out.worst_welfare = worst_ne_profile(inst).welfare;
        out.poa = ratio_or_one(out.optimum, out.worst_welfare);
        return out;
    }

    const std::size_t n = inst.num_agents();
    std::vector<std::vector<std::vector<int>>> sets(n);
    std::vector<std::size_t> radix(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = static_cast<AgentId>(i);
        sets[i] = inst.degree(a) == 0 ? std::vector<std::vector<int>>{{}}
                                      : nonempty_subsets(inst.agent_tasks(a));
        radix[i] = sets[i].size();
    }
    const double total = product_size(radix);
    if (total > kMaxEnumeratedProfiles) throw CapExceeded("poa_pos_on_instance: profile space exceeds 1e6");
    const auto count = static_cast<std::size_t>(total);

    // Profile index is mixed radix with agent 0 most significant.
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t i = n; i-- > 1;) stride[i - 1] = stride[i] * radix[i];

    auto base = std::make_shared<const Instance>(inst);
    std::vector<std::vector<double>> utils(count);
    std::vector<double> welfare(count);
    for (std::size_t code = 0; code < count; ++code) {
        Profile p = Profile::truthful_agents(base);
        for (std::size_t i = 0; i < n; ++i)
            p.agent_reports[i] = AgentReport{sets[i][(code / stride[i]) % radix[i]], std::nullopt};
        Matching mu = run_mechanism(kind, p);
        utils[code] = agent_utilities(inst, mu);
        welfare[code] = matching_weight(inst, mu);
    }

    double worst = std::numeric_limits<double>::infinity();
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t code = 0; code < count; ++code) {
        bool nash = true;
        for (std::size_t i = 0; i < n && nash; ++i) {
            const std::size_t own = (code / stride[i]) % radix[i];
            const std::size_t rest = code - own * stride[i];
            for (std::size_t s = 0; s < radix[i]; ++s) {
                if (utils[rest + s * stride[i]][i] > utils[code][i] + kTolerance) {
                    nash = false;
                    break;
                }
            }
        }
        if (!nash) continue;
        ++out.equilibria;
        worst = std::min(worst, welfare[code]);
        best = std::max(best, welfare[code]);
    }

    out.exact = true;
    if (out.equilibria == 0) {
        out.worst_welfare = worst_ne_profile(inst).welfare;
        out.poa = ratio_or_one(out.optimum, out.worst_welfare);
        return out;
    }
    out.worst_welfare = worst;
    out.best_welfare = best;
    out.poa = ratio_or_one(out.optimum, worst);
    out.pos = ratio_or_one(out.optimum, best);
    return out;
}

} // namespace mvbm
