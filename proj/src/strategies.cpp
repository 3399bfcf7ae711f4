#include "mvbm/strategies.hpp"

#include <algorithm>
#include <sstream>

namespace mvbm {

std::string describe(const ManipulationSpec& spec) {
    struct Visitor {
        std::string operator()(const TLevel& s) const {
            std::ostringstream os;
            os << "tlevel(" << s.threshold << ")";
            return os.str();
        }
        std::string operator()(const KOrder& s) const { return "korder(" + std::to_string(s.k) + ")"; }
        std::string operator()(const TopB&) const { return "topb"; }
        std::string operator()(const ExplicitReport&) const { return "explicit"; }
    };
    return std::visit(Visitor{}, spec);
}

std::string to_string(Setting s) {
    switch (s) {
    case Setting::EMS: return "ems";
    case Setting::ECMS: return "ecms";
    case Setting::EVMS: return "evms";
    }
    return "?";
}

Setting setting_from_string(const std::string& name) {
    if (name == "ems") return Setting::EMS;
    if (name == "ecms") return Setting::ECMS;
    if (name == "evms") return Setting::EVMS;
    throw Error("unknown setting '" + name + "'");
}

namespace {

std::vector<TaskId> sorted_ids(std::vector<TaskId> ids) {
    std::sort(ids.begin(), ids.end());
    return ids;
}

bool is_truthful_report(const Instance& inst, AgentId a, const AgentReport& r) {
    if (r.capacity && *r.capacity != inst.capacity(a)) return false;
    auto adj = inst.agent_tasks(a);
    return std::equal(r.edges.begin(), r.edges.end(), adj.begin(), adj.end());
}

Matching solve_with_report(const Instance& inst, MechanismKind kind, AgentId a,
                           const AgentReport& report) {
    Profile p = Profile::truthful_agents(std::make_shared<const Instance>(inst));
    p.agent_reports[a] = report;
    return run_on_instance(kind, build_effective_instance(p));
}

void require_deterministic(MechanismKind kind, const char* who) {
    if (!is_deterministic(kind)) throw Error(std::string(who) + ": mechanism must be deterministic");
}

} // namespace

AgentReport apply_manipulation(const Instance& inst, AgentId a, const ManipulationSpec& spec) {
    if (!inst.agent_in_range(a)) throw Error("apply_manipulation: unknown agent");
    if (inst.degree(a) == 0) throw Error("apply_manipulation: agent has no edges");

    std::vector<TaskId> ranked(inst.agent_tasks(a).begin(), inst.agent_tasks(a).end());
    sort_by_task_order(inst, ranked);

    AgentReport out;
    if (const auto* s = std::get_if<TLevel>(&spec)) {
        for (TaskId t : ranked)
            if (inst.value(t) >= s->threshold) out.edges.push_back(t);
    } else if (const auto* s = std::get_if<KOrder>(&spec)) {
        if (s->k < 0) throw Error("apply_manipulation: k must be >= 0");
        std::size_t keep = ranked.size() > static_cast<std::size_t>(s->k) ? ranked.size() - s->k : 0;
        out.edges.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep));
    } else if (std::holds_alternative<TopB>(spec)) {
        out.edges = top_valued_tasks(inst, a);
    } else {
        const auto& r = std::get<ExplicitReport>(spec).report;
        for (TaskId t : r.edges)
            if (!inst.has_edge(a, t)) throw Error("apply_manipulation: explicit report invents an edge");
        out = r;
    }
    if (out.edges.empty()) out.edges.push_back(ranked.front());
    out.edges = sorted_ids(std::move(out.edges));
    return out;
}

double gain_ratio(double truthful, double manipulated) {
    double gain = std::max(manipulated - truthful, 0.0);
    if (truthful == 0.0) return gain == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return gain / truthful;
}

GainReport utility_gain_ratio(const Instance& inst, MechanismKind kind, AgentId a,
                              const ManipulationSpec& spec) {
    require_deterministic(kind, "utility_gain_ratio");
    AgentReport report = apply_manipulation(inst, a, spec);
    GainReport g;
    g.agent = a;
    g.truthful_utility = agent_utility(inst, run_on_instance(kind, inst), a);
    g.manipulated_utility = agent_utility(inst, solve_with_report(inst, kind, a, report), a);
    g.gain_ratio = gain_ratio(g.truthful_utility, g.manipulated_utility);
    return g;
}

double mpug(const Instance& inst, MechanismKind kind, std::span<const double> thresholds) {
    require_deterministic(kind, "mpug");
    if (thresholds.empty()) throw Error("mpug: thresholds must be non-empty");
    std::vector<double> truthful = agent_utilities(inst, run_on_instance(kind, inst));
    double best = 0.0;
    for (std::size_t i = 0; i < inst.num_agents(); ++i) {
        const auto a = static_cast<AgentId>(i);
        if (inst.degree(a) == 0) continue;
        std::optional<AgentReport> last;
        double last_utility = 0.0;
        for (double T : thresholds) {
            AgentReport r = apply_manipulation(inst, a, TLevel{T});
            double u;
            if (is_truthful_report(inst, a, r)) {
                u = truthful[i];
            } else if (last && *last == r) {
                u = last_utility;
            } else {
                u = agent_utility(inst, solve_with_report(inst, kind, a, r), a);
            }
            last = r;
            last_utility = u;
            if (truthful[i] == 0.0 && u == 0.0) continue;
            best = std::max(best, gain_ratio(truthful[i], u));
        }
    }
    return best;
}

bool agent_can_gain(const Instance& inst, const std::vector<double>& truthful_utilities,
                    MechanismKind kind, AgentId a, std::span<const ManipulationSpec> specs) {
    if (inst.degree(a) == 0) return false;
    for (const auto& spec : specs) {
        AgentReport r = apply_manipulation(inst, a, spec);
        if (is_truthful_report(inst, a, r)) continue;
        double u = agent_utility(inst, solve_with_report(inst, kind, a, r), a);
        if (u > truthful_utilities[a] + kTolerance) return true;
    }
    return false;
}

double pma(const Instance& inst, MechanismKind kind, std::span<const ManipulationSpec> specs) {
    require_deterministic(kind, "pma");
    if (specs.empty()) throw Error("pma: specs must be non-empty");
    if (inst.num_agents() == 0) return 0.0;
    std::vector<double> truthful = agent_utilities(inst, run_on_instance(kind, inst));
    std::size_t gainers = 0;
    for (std::size_t a = 0; a < inst.num_agents(); ++a)
        if (agent_can_gain(inst, truthful, kind, static_cast<AgentId>(a), specs)) ++gainers;
    return static_cast<double>(gainers) / static_cast<double>(inst.num_agents());
}

double pmi(std::span<const Instance> batch, MechanismKind kind,
           std::span<const ManipulationSpec> specs) {
    if (batch.empty()) throw Error("pmi: batch must be non-empty");
    std::size_t hit = 0;
    for (const Instance& inst : batch)
        if (pma(inst, kind, specs) > 0.0) ++hit;
    return static_cast<double>(hit) / static_cast<double>(batch.size());
}

std::vector<std::vector<int>> nonempty_subsets(std::span<const int> items) {
    if (items.size() > kEnumerationDegreeCap)
        throw CapExceeded("subset enumeration: " + std::to_string(items.size()) +
                          " items exceeds the cap of " + std::to_string(kEnumerationDegreeCap));
    std::vector<int> sorted(items.begin(), items.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::vector<int>> out;
    const std::size_t total = std::size_t{1} << sorted.size();
    out.reserve(total - 1);
    for (std::size_t mask = 1; mask < total; ++mask) {
        std::vector<int> s;
        for (std::size_t k = 0; k < sorted.size(); ++k)
            if (mask & (std::size_t{1} << k)) s.push_back(sorted[k]);
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

BestResponse best_response_exhaustive(const Profile& profile, MechanismKind kind, AgentId a,
                                      Setting setting) {
    require_deterministic(kind, "best_response_exhaustive");
    if (profile.side != Side::Agents) throw Error("best_response_exhaustive: agent-side profile required");
    const Instance& inst = profile.instance();
    if (!inst.agent_in_range(a)) throw Error("best_response_exhaustive: unknown agent");
    if (inst.degree(a) == 0) throw Error("best_response_exhaustive: agent has an empty strategy set");
    if (setting == Setting::EVMS) throw Error("best_response_exhaustive: EVMS is a task-side setting");

    auto subsets = nonempty_subsets(inst.agent_tasks(a));
    const int max_cap = setting == Setting::ECMS ? inst.capacity(a) : 1;

    Profile trial = profile;
    std::optional<BestResponse> best;
    for (auto& edges : subsets) {
        for (int c = 1; c <= max_cap; ++c) {
            AgentReport r{edges, std::nullopt};
            if (setting == Setting::ECMS) r.capacity = c;
            trial.agent_reports[a] = r;
            double u = agent_utility(inst, run_mechanism(kind, trial), a);
            if (!best || u > best->utility + kTolerance) best = BestResponse{std::move(r), u};
        }
    }
    return *best;
}

std::string Deviation::spec() const {
    std::ostringstream os;
    os << "edges={";
    for (std::size_t k = 0; k < edges.size(); ++k) os << (k ? "," : "") << edges[k];
    os << "}";
    if (capacity) os << " capacity=" << *capacity;
    if (value) os << " value=" << *value;
    return os.str();
}

nlohmann::json deviation_to_json(const Deviation& d) {
    nlohmann::json j = {{"entity", d.entity},
                        {"spec", d.spec()},
                        {"edges", d.edges},
                        {"truthful_utility", d.truthful_utility},
                        {"deviant_utility", d.deviant_utility}};
    if (d.capacity) j["capacity"] = *d.capacity;
    if (d.value) j["value"] = *d.value;
    return j;
}

nlohmann::json audit_report_to_json(std::span<const Deviation> deviations) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& d : deviations) out.push_back(deviation_to_json(d));
    return out;
}

NashCheck verify_nash(const Profile& profile, MechanismKind kind, Setting setting) {
    require_deterministic(kind, "verify_nash");
    const Instance& inst = profile.instance();
    for (std::size_t a = 0; a < inst.num_agents(); ++a)
        if (inst.degree(static_cast<AgentId>(a)) > kEnumerationDegreeCap)
            throw CapExceeded("verify_nash: agent degree exceeds enumeration cap");

    std::vector<double> current = agent_utilities(inst, run_mechanism(kind, profile));
    for (std::size_t i = 0; i < inst.num_agents(); ++i) {
        const auto a = static_cast<AgentId>(i);
        if (inst.degree(a) == 0) continue;
        BestResponse br = best_response_exhaustive(profile, kind, a, setting);
        if (br.utility > current[i] + kTolerance) {
            Deviation d;
            d.entity = a;
            d.edges = br.report.edges;
            d.capacity = br.report.capacity;
            d.truthful_utility = current[i];
            d.deviant_utility = br.utility;
            return {false, d};
        }
    }
    return {true, std::nullopt};
}

} // namespace mvbm
