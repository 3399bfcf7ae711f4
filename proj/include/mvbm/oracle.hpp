#pragma once

// Brute-force ground truth for small markets: the optimum by enumeration,
// exhaustive truthfulness audits, coalition searches and equilibrium
// enumeration. None of these routines call the augmenting-path solver for
// the quantity they certify.

#include "mvbm/mechanisms.hpp"
#include "mvbm/strategies.hpp"

#include <optional>
#include <vector>

#include <json.hpp>

namespace mvbm {

inline constexpr std::size_t kBruteForceMaxTasks = 8;
inline constexpr double kBruteForceMaxAssignments = 1e7;
inline constexpr double kMaxEnumeratedProfiles = 1e6;

struct OptimumCertificate {
    double weight = 0.0;
    Matching matching;
    std::size_t enumerated = 0; // feasible complete assignments visited
};

/// Depth-first over tasks; each task stays unmatched or goes to an adjacent
/// agent with residual capacity. Ties keep the lexicographically smallest
/// assignment vector (unmatched < agent 0 < agent 1 ...).
OptimumCertificate brute_force_mvbm(const Instance& inst);

/// Every profitable unilateral agent deviation against truthful others
/// (EMS: non-empty edge subsets; ECMS: also capacities 1..b).
std::vector<Deviation> audit_agent_truthfulness(const Instance& inst, MechanismKind kind,
                                                Setting setting);

/// Every unilateral task report that flips the task from unmatched to
/// matched. EVMS also reports values q * f for f in value_grid.
std::vector<Deviation> audit_task_truthfulness(const Instance& inst, MechanismKind kind,
                                               Setting setting,
                                               const std::vector<double>& value_grid);

struct Coalition {
    std::vector<int> members;
    std::vector<std::vector<int>> reports; // per member, reported neighbours
    std::vector<double> truthful_utilities;
    std::vector<double> deviant_utilities;
};

nlohmann::json coalition_to_json(const Coalition& c);

/// First agent coalition (size 1..max_size, then lexicographic members and
/// joint reports) whose joint edge-subset report weakly improves every member
/// and strictly improves one.
std::optional<Coalition> find_agent_coalition(const Instance& inst, MechanismKind kind,
                                              std::size_t max_size = 3);

/// Same for tasks, with 0/1 task utilities.
std::optional<Coalition> find_task_coalition(const Instance& inst, MechanismKind kind,
                                             std::size_t max_size = 3);

inline constexpr std::size_t kExactNashMaxAgents = 3;
inline constexpr std::size_t kExactNashMaxDegree = 4;

struct PoaPos {
    double poa = 1.0;
    std::optional<double> pos;  // only in exact mode
    bool exact = false;
    std::size_t equilibria = 0; // pure equilibria found (exact mode)
    double optimum = 0.0;
    double worst_welfare = 0.0;
    std::optional<double> best_welfare;
};

bool exact_nash_feasible(const Instance& inst);

/// Exact when exact_nash_feasible: enumerates pure EMS profiles. Otherwise
/// the worst equilibrium welfare comes from worst_ne_profile and only poa is
/// set. A 0/0 ratio is 1.
PoaPos poa_pos_on_instance(const Instance& inst, MechanismKind kind);

} // namespace mvbm
