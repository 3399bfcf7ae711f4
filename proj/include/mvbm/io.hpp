#pragma once

// JSON encoding of instances and matchings.
//
// Instance: {"agents":[{"capacity":int},...],
//            "tasks":[{"value":float},...],
//            "edges":[[agent_id,task_id],...]}

#include "mvbm/core.hpp"

#include <filesystem>
#include <json.hpp>

namespace mvbm {

nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);

/// [[agent,task],...] in (agent, task) order.
nlohmann::json matching_to_json(const Matching& mu);
Matching matching_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace mvbm
