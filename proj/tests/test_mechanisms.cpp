#include "mvbm/fixtures.hpp"
#include "mvbm/mechanisms.hpp"
#include "mvbm/solver.hpp"
#include "mvbm/strategies.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace mvbm;

namespace {

Profile with_agent_report(const Instance& inst, AgentId a, std::vector<TaskId> edges,
                          std::optional<int> capacity = std::nullopt) {
    Profile p = Profile::truthful_agents(inst);
    p.agent_reports[a] = AgentReport{std::move(edges), capacity};
    return p;
}

} // namespace

TEST_CASE("mechanism names") {
    CHECK(to_string(MechanismKind::MBFS) == "bfs");
    CHECK(mechanism_from_string("rbfs") == MechanismKind::MrBFS);
    CHECK_THROWS_AS(mechanism_from_string("greedy"), Error);
    CHECK(is_deterministic(MechanismKind::MAP));
    CHECK_FALSE(is_deterministic(MechanismKind::MrBFS));
}

TEST_CASE("effective instance materializes reports") {
    const Instance inst = fixtures::no_truthful_optimum();
    CHECK(build_effective_instance(Profile::truthful_agents(inst)) == inst);

    Instance hidden = build_effective_instance(with_agent_report(inst, 0, {0}));
    CHECK(hidden.num_edges() == inst.num_edges() - 1);
    CHECK_FALSE(hidden.has_edge(0, 1));

    Instance big({3, 1}, {1.0, 1.0}, {{0, 0}, {0, 1}, {1, 0}});
    CHECK(build_effective_instance(with_agent_report(big, 0, {0, 1}, 1)).capacity(0) == 1);

    Profile tp = Profile::truthful_tasks(inst);
    tp.task_reports[0] = TaskReport{{1}, 0.5};
    Instance tasks_side = build_effective_instance(tp);
    CHECK(tasks_side.value(0) == 0.5);
    CHECK_FALSE(tasks_side.has_edge(0, 0));
}

TEST_CASE("reports must be bounded by the truth") {
    const Instance inst = fixtures::no_truthful_optimum();
    CHECK_THROWS_AS(build_effective_instance(with_agent_report(inst, 0, {2})), Error);
    CHECK_THROWS_AS(build_effective_instance(with_agent_report(inst, 0, {0}, 2)), Error);
    CHECK_THROWS_AS(build_effective_instance(with_agent_report(inst, 0, {0}, 0)), Error);
    Profile tp = Profile::truthful_tasks(inst);
    tp.task_reports[1] = TaskReport{{0}, 0.2};
    CHECK_THROWS_AS(validate_profile(tp), Error);
    tp.task_reports[1] = TaskReport{{}, std::nullopt};
    CHECK_THROWS_AS(validate_profile(tp), Error);
    tp.task_reports[1] = TaskReport{{0}, 0.0};
    CHECK_THROWS_AS(validate_profile(tp), Error);
    // Abstaining is representable on the agent side.
    CHECK_NOTHROW(validate_profile(with_agent_report(inst, 1, {})));
}

TEST_CASE("run_mechanism worked outputs") {
    const Instance t1 = fixtures::no_truthful_optimum();
    CHECK(matching_weight(t1, run_mechanism(MechanismKind::MBFS, Profile::truthful_agents(t1))) ==
          doctest::Approx(1.1));
    const double eps = 1e-3;
    const Instance t2 = fixtures::epsilon_pair(eps);
    CHECK(matching_weight(t2, run_mechanism(MechanismKind::MAP, Profile::truthful_agents(t2))) ==
          doctest::Approx(1.0 + eps));
    CHECK(format_matching(run_mechanism(MechanismKind::MAP, with_agent_report(fixtures::greedy_collusion(), 0, {1}))) ==
          "{(a3,t1),(a1,t2)}");
    CHECK_THROWS_AS(run_mechanism(MechanismKind::MrBFS, Profile::truthful_agents(t1)), Error);
}

TEST_CASE("first-come-first-served policies") {
    const Instance inst = fixtures::first_agent_priority();
    auto f = fcfs_policies(inst);
    CHECK(f.policies[0] == std::vector<TaskId>{0, 1});
    CHECK(f.policies[1].empty());
    CHECK(f.policies[2].empty());
    REQUIRE(f.residual.size() == 4);
    CHECK(f.residual[0] == std::vector<TaskId>{0, 1, 2, 3});
    CHECK(f.residual[1] == std::vector<TaskId>{2, 3});

    auto ne = worst_ne_profile(inst);
    CHECK(ne.welfare == doctest::Approx(0.75));
    CHECK(ne.profile.agent_reports[1]->abstains());

    const Instance eps = fixtures::epsilon_pair(1e-3);
    CHECK(worst_ne_profile(eps).welfare == doctest::Approx(1.001));

    Instance lonely({1, 1}, {1.0}, {{0, 0}});
    CHECK(fcfs_policies(lonely).policies[1].empty());
}

TEST_CASE("greedy equals the union of FCFS policies, which is a fixed point") {
    for (std::uint64_t k = 0; k < 300; ++k) {
        const Instance inst = k % 2 ? testing::small_instance(21, k, 6, 8, 3, 0.5)
                                    : testing::tied_instance(21, k, 6, 8, 3, 0.5);
        auto f = fcfs_policies(inst);
        CHECK(solve_ap(inst) == f.as_matching());
        for (std::size_t a = 0; a < inst.num_agents(); ++a) {
            CHECK(f.policies[a].size() <= static_cast<std::size_t>(inst.capacity(static_cast<AgentId>(a))));
            for (TaskId t : f.policies[a]) CHECK(std::count(f.residual[a].begin(), f.residual[a].end(), t) == 1);
        }
        auto ne = worst_ne_profile(inst);
        CHECK(run_mechanism(MechanismKind::MBFS, ne.profile) == f.as_matching());
        CHECK(run_mechanism(MechanismKind::MDFS, ne.profile) == f.as_matching());
    }
}

TEST_CASE("best report of the first agent") {
    const Instance inst = fixtures::first_agent_priority();
    CHECK(first_agent_best_report(inst) == std::vector<TaskId>{0, 1});
    const Instance eps = fixtures::epsilon_pair(0.5);
    CHECK(first_agent_best_report(eps) == std::vector<TaskId>{0});
    CHECK(agent_utility(eps, run_mechanism(MechanismKind::MBFS, with_agent_report(eps, 0, {0})), 0) ==
          doctest::Approx(1.5));
    Instance roomy({5}, {1.0, 2.0}, {{0, 0}, {0, 1}});
    CHECK(first_agent_best_report(roomy) == std::vector<TaskId>{0, 1});
    Instance isolated({1, 1}, {1.0}, {{1, 0}});
    CHECK_THROWS_AS(first_agent_best_report(isolated), Error);
}

TEST_CASE("lottery weights and draws") {
    Instance inst({1, 1}, {1.0, 0.5}, {{0, 0}, {0, 1}, {1, 0}});
    auto w = lottery_weights(inst);
    CHECK(w[0] == doctest::Approx(1.0 / 2.0 + 1.0 / 1.5));
    CHECK(w[1] == doctest::Approx(0.5));

    Instance single({2}, {1.0}, {{0, 0}});
    Rng rng(3);
    CHECK(sample_agent_order(single, rng) == std::vector<AgentId>{0});

    // Zero-weight agents trail in id order.
    Instance idle({1, 1, 1, 1}, {1.0}, {{2, 0}});
    Rng rng2(4);
    CHECK(sample_agent_order(idle, rng2) == std::vector<AgentId>{2, 0, 1, 3});
}

TEST_CASE("symmetric agents lead equally often") {
    Instance inst({1, 1}, {1.0, 2.0}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    const int draws = 10000;
    int first0 = 0;
    for (int k = 0; k < draws; ++k) {
        Rng rng = make_rng(5, {static_cast<std::uint64_t>(k)});
        if (sample_agent_order(inst, rng)[0] == 0) ++first0;
    }
    const double e = draws / 2.0;
    const double chi2 = (first0 - e) * (first0 - e) / e + ((draws - first0) - e) * ((draws - first0) - e) / e;
    CHECK(chi2 < 10.83); // one degree of freedom, p = 0.001
}

TEST_CASE("weighted draw follows the weights") {
    // weights 1/(1+1) = 0.5 and 1/(1+1) + 1/(1+1) = 1.0
    Instance inst({1, 1}, {1.0, 1.0}, {{0, 0}, {1, 0}, {1, 1}});
    const int draws = 20000;
    int first1 = 0;
    for (int k = 0; k < draws; ++k) {
        Rng rng = make_rng(6, {static_cast<std::uint64_t>(k)});
        if (sample_agent_order(inst, rng)[0] == 1) ++first1;
    }
    const double p = 2.0 / 3.0;
    const double sd = std::sqrt(draws * p * (1 - p));
    CHECK(std::abs(first1 - draws * p) < 4 * sd);
}

TEST_CASE("randomized mechanism expectations") {
    const Instance inst = fixtures::lottery_pair();
    auto truthful = run_randomized_bfs(Profile::truthful_agents(inst), 500, 9);
    CHECK(truthful[0] >= 1.0);
    CHECK(truthful[0] <= 2.0);
    CHECK(truthful[1] >= 1.0);
    CHECK(truthful[1] <= 2.0);
    CHECK(truthful[0] + truthful[1] == doctest::Approx(3.0));

    auto hidden = run_randomized_bfs(with_agent_report(inst, 0, {0}), 500, 9);
    CHECK(hidden[0] == 2.0);

    // One trial is one concrete run on the substream (seed, 0).
    auto one = randomized_bfs_samples(Profile::truthful_agents(inst), 1, 11);
    Rng rng = make_rng(11, {0});
    Matching mu = run_on_instance(MechanismKind::MrBFS, inst, &rng);
    CHECK(one[0][0] == agent_utility(inst, mu, 0));
    CHECK(one[1][0] == agent_utility(inst, mu, 1));

    CHECK(run_randomized_bfs(Profile::truthful_agents(inst), 64, 3) ==
          run_randomized_bfs(Profile::truthful_agents(inst), 64, 3));
    CHECK_THROWS_AS(run_randomized_bfs(Profile::truthful_agents(inst), 0, 3), Error);
}

TEST_CASE("randomized output keeps original agent ids") {
    for (std::uint64_t k = 0; k < 100; ++k) {
        const Instance inst = testing::small_instance(22, k, 5, 6, 2, 0.6);
        Rng rng = make_rng(1, {k});
        Matching mu = run_on_instance(MechanismKind::MrBFS, inst, &rng);
        REQUIRE(is_feasible_matching(inst, mu));
        CHECK(matching_weight(inst, mu) == doctest::Approx(matching_weight(inst, solve_mvbm(inst, Traversal::BreadthFirst))));
    }
}

TEST_CASE("task reports never flip an unmatched task") {
    for (std::uint64_t k = 0; k < 150; ++k) {
        const Instance inst = testing::small_instance(23, k, 4, 4, 2, 0.6);
        auto base = std::make_shared<const Instance>(inst);
        for (auto kind : {MechanismKind::MBFS, MechanismKind::MDFS, MechanismKind::MAP}) {
            Matching truth = run_on_instance(kind, inst);
            for (std::size_t j = 0; j < inst.num_tasks(); ++j) {
                const auto t = static_cast<TaskId>(j);
                if (truth.covers_task(t) || inst.task_agents(t).empty()) continue;
                for (const auto& edges : nonempty_subsets(inst.task_agents(t)))
                    for (double f : {1.0, 0.5, 0.25}) {
                        Profile p = Profile::truthful_tasks(base);
                        p.task_reports[j] = TaskReport{edges, inst.value(t) * f};
                        CHECK_FALSE(run_mechanism(kind, p).covers_task(t));
                    }
            }
        }
    }
}

TEST_CASE("an unmatched agent cannot gain by hiding edges") {
    for (std::uint64_t k = 0; k < 150; ++k) {
        const Instance inst = testing::small_instance(24, k, 4, 4, 2, 0.6);
        for (auto kind : {MechanismKind::MBFS, MechanismKind::MDFS}) {
            auto utils = agent_utilities(inst, run_on_instance(kind, inst));
            for (std::size_t a = 0; a < inst.num_agents(); ++a) {
                if (utils[a] != 0.0 || inst.degree(static_cast<AgentId>(a)) == 0) continue;
                for (const auto& edges : nonempty_subsets(inst.agent_tasks(static_cast<AgentId>(a))))
                    CHECK(agent_utility(inst, run_mechanism(kind, with_agent_report(inst, static_cast<AgentId>(a), edges)),
                                        static_cast<AgentId>(a)) == 0.0);
            }
        }
    }
}

TEST_CASE("profile JSON round-trips") {
    auto base = std::make_shared<const Instance>(fixtures::first_agent_priority());
    Profile p = Profile::truthful_agents(base);
    p.agent_reports[0] = AgentReport{{0, 1}, 1};
    p.agent_reports[2] = AgentReport{{}, std::nullopt};
    auto j = profile_to_json(p);
    CHECK(j["reports"][1].is_null());
    CHECK(profile_to_json(profile_from_json(j, base)) == j);

    Profile tp = Profile::truthful_tasks(base);
    tp.task_reports[3] = TaskReport{{0}, 0.03};
    auto tj = profile_to_json(tp);
    CHECK(profile_to_json(profile_from_json(tj, base)) == tj);

    CHECK_THROWS_AS(profile_from_json(nlohmann::json::parse(R"({"side":"agents","reports":[null]})"), base), Error);
    CHECK_THROWS_AS(profile_from_json(nlohmann::json::parse(R"({"side":"both","reports":[]})"), base), Error);
}
