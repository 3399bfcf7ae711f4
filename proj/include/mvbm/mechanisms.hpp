#pragma once

// The solvers as mechanisms over strategic reports.
//
// Reports are bounded: an entity may hide edges (and lower its capacity or
// value), never invent them. An agent report with an empty edge set means the
// agent abstains; it is representable so that first-come-first-served
// profiles with empty policies can be fed back into a mechanism, but the
// exhaustive strategy enumerations elsewhere never generate it.

#include "mvbm/core.hpp"
#include "mvbm/rng.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace mvbm {

enum class Side { Agents, Tasks };

enum class MechanismKind { MBFS, MDFS, MAP, MrBFS };

std::string to_string(MechanismKind kind);
MechanismKind mechanism_from_string(const std::string& name);
bool is_deterministic(MechanismKind kind);

struct AgentReport {
    std::vector<TaskId> edges;      // sorted task ids
    std::optional<int> capacity;    // ECMS only

    bool abstains() const { return edges.empty(); }
    friend bool operator==(const AgentReport&, const AgentReport&) = default;
};

struct TaskReport {
    std::vector<AgentId> edges;     // sorted agent ids
    std::optional<double> value;    // EVMS only

    friend bool operator==(const TaskReport&, const TaskReport&) = default;
};

/// Reports of one strategic side against the true market. A missing report
/// (nullopt) stands for the truthful one.
struct Profile {
    Side side = Side::Agents;
    std::shared_ptr<const Instance> base;
    std::vector<std::optional<AgentReport>> agent_reports;
    std::vector<std::optional<TaskReport>> task_reports;

    static Profile truthful_agents(std::shared_ptr<const Instance> base);
    static Profile truthful_agents(const Instance& base);
    static Profile truthful_tasks(std::shared_ptr<const Instance> base);
    static Profile truthful_tasks(const Instance& base);

    const Instance& instance() const { return *base; }
};

/// Throws Error when a report is not bounded by the true market.
void validate_profile(const Profile& profile);

/// The market as reported. The non-reporting side is copied from the base.
Instance build_effective_instance(const Profile& profile);

/// Relabels agents: agent k of the result is agent order[k] of inst.
Instance permute_agents(const Instance& inst, std::span<const AgentId> order);

/// Solver output of `kind` on the reported market. MrBFS needs a seed; its
/// output is expressed with the original agent ids.
Matching run_mechanism(MechanismKind kind, const Profile& profile,
                       std::optional<std::uint64_t> rng_seed = std::nullopt);

/// Same, on an already materialized reported market.
Matching run_on_instance(MechanismKind kind, const Instance& reported, Rng* rng = nullptr);

/// Output of first-come-first-served recursion: residual[0] = all tasks,
/// residual[i] = residual[i-1] minus policies[i-1].
struct FcfsPolicySet {
    std::vector<std::vector<TaskId>> policies; // per agent, processing order
    std::vector<std::vector<TaskId>> residual; // n + 1 entries, increasing id

    Matching as_matching() const;
};

FcfsPolicySet fcfs_policies(const Instance& inst);

struct WorstNe {
    Profile profile;
    double welfare = 0.0;
};

/// Every agent reports exactly its FCFS policy (abstaining when empty).
WorstNe worst_ne_profile(const Instance& inst);

/// The min(capacity, degree) highest-valued tasks adjacent to agent a.
std::vector<TaskId> top_valued_tasks(const Instance& inst, AgentId a);

/// top_valued_tasks for agent 0. Throws Error if agent 0 is isolated.
std::vector<TaskId> first_agent_best_report(const Instance& inst);

/// Lottery weight sum_{t adjacent} 1 / (1 + q_t) for every agent of the
/// reported market.
std::vector<double> lottery_weights(const Instance& reported);

/// Weighted draw without replacement: each round picks agent a with
/// probability w_a / sum of remaining weights. Zero-weight agents follow all
/// positive-weight ones in id order.
std::vector<AgentId> sample_agent_order(const Instance& reported, Rng& rng);

/// Per-trial utilities: samples[a][k] is agent a's utility in trial k. Trial k
/// draws its order from the substream (seed, k).
std::vector<std::vector<double>> randomized_bfs_samples(const Profile& profile, std::size_t trials,
                                                        std::uint64_t seed);

/// Monte Carlo mean utility per agent under MrBFS.
std::vector<double> run_randomized_bfs(const Profile& profile, std::size_t trials,
                                       std::uint64_t seed);

nlohmann::json profile_to_json(const Profile& profile);
Profile profile_from_json(const nlohmann::json& j, std::shared_ptr<const Instance> base);

} // namespace mvbm
