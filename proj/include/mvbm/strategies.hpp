#pragma once

// Agent manipulation families, gain metrics, best responses and Nash checks.

#include "mvbm/mechanisms.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace mvbm {

/// Hide every edge to a task valued below the threshold.
struct TLevel {
    double threshold = 0.0;
};

/// Hide the edges to the k lowest-valued adjacent tasks.
struct KOrder {
    int k = 0;
};

/// Keep only the top-capacity valued adjacent tasks.
struct TopB {};

struct ExplicitReport {
    AgentReport report;
};

using ManipulationSpec = std::variant<TLevel, KOrder, TopB, ExplicitReport>;

std::string describe(const ManipulationSpec& spec);

enum class Setting { EMS, ECMS, EVMS };

std::string to_string(Setting s);
Setting setting_from_string(const std::string& name);

/// Result of applying a spec. Never empty: if every edge would be dropped,
/// the single highest-valued edge is kept.
AgentReport apply_manipulation(const Instance& inst, AgentId a, const ManipulationSpec& spec);

struct GainReport {
    AgentId agent = 0;
    double truthful_utility = 0.0;
    double manipulated_utility = 0.0;
    /// max(manipulated - truthful, 0) / truthful, with 0/0 = 1.
    double gain_ratio = 0.0;
};

double gain_ratio(double truthful, double manipulated);

GainReport utility_gain_ratio(const Instance& inst, MechanismKind kind, AgentId a,
                              const ManipulationSpec& spec);

/// Maximum gain ratio over agents and T-level thresholds. Agents whose
/// truthful and manipulated utilities are both 0 are left out (their 0/0
/// ratio is a convention, not a gain). Returns 0 when nothing contributes.
double mpug(const Instance& inst, MechanismKind kind, std::span<const double> thresholds);

/// Agent a gains strictly (> tolerance) under at least one spec.
bool agent_can_gain(const Instance& inst, const std::vector<double>& truthful_utilities,
                    MechanismKind kind, AgentId a, std::span<const ManipulationSpec> specs);

/// Fraction of agents that gain under at least one spec.
double pma(const Instance& inst, MechanismKind kind, std::span<const ManipulationSpec> specs);

/// Fraction of instances with pma > 0.
double pmi(std::span<const Instance> batch, MechanismKind kind,
           std::span<const ManipulationSpec> specs);

/// Upper bound on the degree the exhaustive routines will enumerate.
inline constexpr std::size_t kEnumerationDegreeCap = 20;

/// All non-empty subsets of `items`, each sorted, in lexicographic order.
std::vector<std::vector<int>> nonempty_subsets(std::span<const int> items);

struct BestResponse {
    AgentReport report;
    double utility = 0.0;
};

/// Exhaustive best response of agent a against the other reports of
/// `profile` (a's own entry is ignored). EMS enumerates non-empty edge
/// subsets; ECMS also capacities 1..b_a. Ties go to the lexicographically
/// smallest subset, then the smallest capacity.
BestResponse best_response_exhaustive(const Profile& profile, MechanismKind kind, AgentId a,
                                      Setting setting = Setting::EMS);

/// A unilateral (or coalition member's) profitable report.
struct Deviation {
    int entity = 0;                       // agent or task id
    std::vector<int> edges;               // reported neighbours
    std::optional<int> capacity;          // ECMS
    std::optional<double> value;          // EVMS
    double truthful_utility = 0.0;
    double deviant_utility = 0.0;

    std::string spec() const;
};

nlohmann::json deviation_to_json(const Deviation& d);
nlohmann::json audit_report_to_json(std::span<const Deviation> deviations);

struct NashCheck {
    bool is_nash = true;
    std::optional<Deviation> deviation; // first profitable deviation, by agent id
};

/// True iff no agent has a strictly better unilateral report.
NashCheck verify_nash(const Profile& profile, MechanismKind kind, Setting setting = Setting::EMS);

} // namespace mvbm
