#include "mvbm/gen.hpp"
#include "mvbm/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace mvbm;

namespace {

GenConfig config(int n, int m, double p, int lo, int hi, std::uint64_t seed) {
    GenConfig c;
    c.n = n;
    c.m = m;
    c.p = p;
    c.capacity_low = lo;
    c.capacity_high = hi;
    c.seed = seed;
    return c;
}

} // namespace

TEST_CASE("edge probability extremes") {
    const Instance full = generate_instance(config(7, 9, 1.0, 1, 3, 1), 0);
    CHECK(full.num_edges() == 63);
    CHECK(validate_instance(full).empty());
    const Instance none = generate_instance(config(7, 9, 0.0, 1, 3, 1), 0);
    CHECK(none.num_edges() == 0);
    CHECK(none.num_agents() == 7);
    CHECK(none.num_tasks() == 9);
}

TEST_CASE("edge count matches n*m*p") {
    const GenConfig c = config(20, 30, 0.6, 3, 3, 7);
    const int count = 10000;
    double sum = 0.0;
    for (int k = 0; k < count; ++k) sum += static_cast<double>(generate_instance(c, k).num_edges());
    const double sd = std::sqrt(600 * 0.6 * 0.4 / count);
    CHECK(std::abs(sum / count - 360.0) <= 3 * sd);
}

TEST_CASE("values follow the clipped Gaussian") {
    const GenConfig c = config(1, 100, 0.0, 1, 1, 8);
    double sum = 0.0;
    int zeros = 0;
    int total = 0;
    for (int k = 0; k < 1000; ++k) {
        const Instance inst = generate_instance(c, k);
        for (std::size_t t = 0; t < inst.num_tasks(); ++t) {
            const double q = inst.value(static_cast<TaskId>(t));
            CHECK(q >= 0.0);
            sum += q;
            zeros += q == 0.0;
            ++total;
        }
    }
    REQUIRE(total == 100000);
    CHECK(std::abs(sum / total - 3.0) <= 0.01);
    CHECK(static_cast<double>(zeros) / total < 1e-4);
}

TEST_CASE("capacities cover the range") {
    const GenConfig c = config(50, 1, 0.5, 3, 7, 9);
    std::set<int> seen;
    for (int k = 0; k < 20; ++k) {
        const Instance inst = generate_instance(c, k);
        for (std::size_t a = 0; a < inst.num_agents(); ++a) {
            const int b = inst.capacity(static_cast<AgentId>(a));
            CHECK(b >= 3);
            CHECK(b <= 7);
            seen.insert(b);
        }
    }
    CHECK(seen == std::set<int>{3, 4, 5, 6, 7});
}

TEST_CASE("draw order: capacities, values, edges row-major") {
    const GenConfig c = config(4, 5, 0.5, 1, 4, 11);
    Rng rng = make_rng(c.seed, {3});
    std::uniform_int_distribution<int> cap(1, 4);
    std::vector<int> b(4);
    for (int& x : b) x = cap(rng);
    std::normal_distribution<double> z(3.0, 0.77);
    std::vector<double> q(5);
    for (double& x : q) x = std::max(z(rng), 0.0);
    std::bernoulli_distribution coin(0.5);
    std::vector<Edge> edges;
    for (int a = 0; a < 4; ++a)
        for (int t = 0; t < 5; ++t)
            if (coin(rng)) edges.push_back({a, t});
    CHECK(generate_instance(c, 3) == Instance(b, q, edges));
}

TEST_CASE("streams are deterministic and indexed") {
    const GenConfig c = config(6, 8, 0.4, 1, 3, 12);
    CHECK(generate_instance(c, 5) == generate_instance(c, 5));
    CHECK_FALSE(generate_instance(c, 5) == generate_instance(c, 6));
    GenConfig other = c;
    other.seed = 13;
    CHECK_FALSE(generate_instance(c, 5) == generate_instance(other, 5));
}

TEST_CASE("zero sigma gives constant values") {
    GenConfig c = config(2, 4, 0.5, 1, 1, 1);
    c.value_sigma = 0.0;
    const Instance inst = generate_instance(c, 0);
    for (std::size_t t = 0; t < 4; ++t) CHECK(inst.value(static_cast<TaskId>(t)) == 3.0);
}

TEST_CASE("config validation and JSON") {
    CHECK_THROWS_AS(validate_gen_config(config(-1, 5, 0.5, 1, 1, 1)), Error);
    CHECK_NOTHROW(validate_gen_config(config(0, 0, 0.5, 1, 1, 1)));
    CHECK_THROWS_AS(validate_gen_config(config(5, -1, 0.5, 1, 1, 1)), Error);
    CHECK_THROWS_AS(validate_gen_config(config(5, 5, 1.5, 1, 1, 1)), Error);
    CHECK_THROWS_AS(validate_gen_config(config(5, 5, 0.5, 0, 1, 1)), Error);
    CHECK_THROWS_AS(validate_gen_config(config(5, 5, 0.5, 3, 2, 1)), Error);
    GenConfig neg = config(5, 5, 0.5, 1, 1, 1);
    neg.value_sigma = -1.0;
    CHECK_THROWS_AS(validate_gen_config(neg), Error);

    const GenConfig c = config(20, 30, 0.6, 3, 5, 99);
    CHECK(gen_config_from_json(gen_config_to_json(c)) == c);
    CHECK_THROWS_AS(gen_config_from_json(nlohmann::json::parse(R"({"n":"x"})")), Error);
}
