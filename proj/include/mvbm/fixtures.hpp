#pragma once

// Small hand-built markets with known outcomes, and a replay that checks
// every one of them.

#include "mvbm/core.hpp"

#include <string>
#include <vector>

namespace mvbm::fixtures {

/// b = (1,1), q = (1, 0.1, 0.1); optimum 1.1.
Instance no_truthful_optimum();
/// b = (1,1), q = (1+eps, 1), edges a1-t1, a1-t2, a2-t1.
Instance epsilon_pair(double eps);
/// Three unit agents, two unit tasks; a1 and a3 collude under greedy.
Instance greedy_collusion();
/// Agents alpha (b=2), beta, gamma (b=1); q_j = 2^-j over four tasks.
Instance first_agent_priority();
/// Three unit agents, q = (1, 0.5), complete.
Instance bfs_dfs_split();
/// Five agents of capacity 2 in two classes; q_j = 3^-j over three tasks.
Instance two_classes();
/// b = (1,1), q = (1, 0.9, 0.1); tasks 1 and 3 can collude.
Instance task_collusion();
/// b = (1,1), q = (2,1), complete.
Instance lottery_pair();

struct FixtureResult {
    std::string name;
    std::string expected;
    std::string actual;
    bool pass = false;
};

std::vector<FixtureResult> run_fixtures();

} // namespace mvbm::fixtures
