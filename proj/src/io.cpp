#include "mvbm/io.hpp"

#include <fstream>
#include <sstream>

namespace mvbm {

using nlohmann::json;

json instance_to_json(const Instance& inst) {
    json agents = json::array();
    for (int b : inst.capacities()) agents.push_back({{"capacity", b}});
    json tasks = json::array();
    for (double q : inst.values()) tasks.push_back({{"value", q}});
    json edges = json::array();
    for (const Edge& e : inst.edges()) edges.push_back({e.agent, e.task});
    return {{"agents", agents}, {"tasks", tasks}, {"edges", edges}};
}

Instance instance_from_json(const json& j) {
    try {
        std::vector<int> caps;
        for (const auto& a : j.at("agents")) caps.push_back(a.at("capacity").get<int>());
        std::vector<double> values;
        for (const auto& t : j.at("tasks")) values.push_back(t.at("value").get<double>());
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw Error("edge must be [agent_id, task_id]");
            edges.push_back({e[0].get<int>(), e[1].get<int>()});
        }
        return Instance(std::move(caps), std::move(values), std::move(edges));
    } catch (const json::exception& ex) {
        throw Error(std::string("malformed instance JSON: ") + ex.what());
    }
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& ex) {
        throw Error("cannot parse " + path.string() + ": " + ex.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
}

Instance load_instance(const std::filesystem::path& path) {
    return instance_from_json(read_json_file(path));
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
    write_text_file(path, instance_to_json(inst).dump(1) + "\n");
}

json matching_to_json(const Matching& mu) {
    json out = json::array();
    for (const Edge& e : mu.pairs()) out.push_back({e.agent, e.task});
    return out;
}

Matching matching_from_json(const json& j) {
    std::vector<Edge> pairs;
    for (const auto& e : j) pairs.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    return Matching(std::move(pairs));
}

} // namespace mvbm
