#include "mvbm/gen.hpp"

#include "mvbm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mvbm {

void validate_gen_config(const GenConfig& cfg) {
    if (cfg.n < 0 || cfg.m < 0) throw Error("gen: n and m must be non-negative");
    if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) throw Error("gen: p must lie in [0, 1]");
    if (cfg.capacity_low < 1) throw Error("gen: capacity_low must be >= 1");
    if (cfg.capacity_low > cfg.capacity_high) throw Error("gen: capacity_low > capacity_high");
    if (!std::isfinite(cfg.value_mean)) throw Error("gen: value_mean must be finite");
    if (!(std::isfinite(cfg.value_sigma) && cfg.value_sigma >= 0.0))
        throw Error("gen: value_sigma must be finite and >= 0");
}

Instance generate_instance(const GenConfig& cfg, std::uint64_t index) {
    validate_gen_config(cfg);
    Rng rng = make_rng(cfg.seed, {index});

    std::uniform_int_distribution<int> cap(cfg.capacity_low, cfg.capacity_high);
    std::vector<int> capacities(static_cast<std::size_t>(cfg.n));
    for (int& b : capacities) b = cap(rng);

    std::normal_distribution<double> z(cfg.value_mean, cfg.value_sigma);
    std::vector<double> values(static_cast<std::size_t>(cfg.m));
    for (double& q : values) q = std::max(cfg.value_sigma > 0.0 ? z(rng) : cfg.value_mean, 0.0);

    std::bernoulli_distribution coin(cfg.p);
    std::vector<Edge> edges;
    for (int a = 0; a < cfg.n; ++a)
        for (int t = 0; t < cfg.m; ++t)
            if (coin(rng)) edges.push_back({a, t});

    return Instance(std::move(capacities), std::move(values), std::move(edges));
}

nlohmann::json gen_config_to_json(const GenConfig& cfg) {
    return {{"n", cfg.n},
            {"m", cfg.m},
            {"p", cfg.p},
            {"capacity_low", cfg.capacity_low},
            {"capacity_high", cfg.capacity_high},
            {"value_mean", cfg.value_mean},
            {"value_sigma", cfg.value_sigma},
            {"seed", cfg.seed}};
}

GenConfig gen_config_from_json(const nlohmann::json& j) {
    try {
        GenConfig cfg;
        cfg.n = j.value("n", cfg.n);
        cfg.m = j.value("m", cfg.m);
        cfg.p = j.value("p", cfg.p);
        cfg.capacity_low = j.value("capacity_low", cfg.capacity_low);
        cfg.capacity_high = j.value("capacity_high", cfg.capacity_high);
        cfg.value_mean = j.value("value_mean", cfg.value_mean);
        cfg.value_sigma = j.value("value_sigma", cfg.value_sigma);
        cfg.seed = j.value("seed", cfg.seed);
        validate_gen_config(cfg);
        return cfg;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("malformed generator config: ") + ex.what());
    }
}

} // namespace mvbm
