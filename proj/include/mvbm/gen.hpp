#pragma once

// Seeded random markets: uniform integer capacities, clipped Gaussian task
// values, independent Bernoulli edges.

#include "mvbm/core.hpp"

#include <cstdint>

#include <json.hpp>

namespace mvbm {

struct GenConfig {
    int n = 10;
    int m = 10;
    double p = 0.5;
    int capacity_low = 1;
    int capacity_high = 1;
    double value_mean = 3.0;
    double value_sigma = 0.77; // standard deviation
    std::uint64_t seed = 1;

    friend bool operator==(const GenConfig&, const GenConfig&) = default;
};

/// Throws Error on an invalid configuration.
void validate_gen_config(const GenConfig& cfg);

/// Instance number `index` of the stream. Draws capacities, then values, then
/// edges row-major (agent-major), all from the substream (seed, index).
Instance generate_instance(const GenConfig& cfg, std::uint64_t index);

nlohmann::json gen_config_to_json(const GenConfig& cfg);
GenConfig gen_config_from_json(const nlohmann::json& j);

} // namespace mvbm
