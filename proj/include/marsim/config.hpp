#pragma once

#include <istream>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "marsim/sim.hpp"

namespace marsim {

struct RunConfig {
    MatchConfig match;
    std::optional<std::string> out_path;
};

// JSON run configuration. Every MatchConfig field is a key; unspecified keys
// take the defaults; unknown keys are rejected by name.
inline RunConfig load_run_config(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");

    static const std::set<std::string> known = {
        "seed",          "steps",          "vertices",       "extra_edges",
        "team_size",     "max_energy",     "recharge_rate",  "unknown_edge_weight",
        "occupy_goals",  "t_round",        "award_retries",  "max_rounds",
        "drop_probability", "fault_schedule", "start_positions_a", "start_positions_b",
        "out"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) throw ConfigError("unknown config key: " + key);
    }

    RunConfig rc;
    MatchConfig& c = rc.match;
    try {
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("steps")) c.steps = j.at("steps").get<int>();
        if (j.contains("vertices")) c.vertices = j.at("vertices").get<int>();
        if (j.contains("extra_edges")) c.extra_edges = j.at("extra_edges").get<int>();
        if (j.contains("team_size")) c.team_size = j.at("team_size").get<int>();
        if (j.contains("max_energy")) c.max_energy = j.at("max_energy").get<int>();
        if (j.contains("recharge_rate")) c.recharge_rate = j.at("recharge_rate").get<int>();
        if (j.contains("unknown_edge_weight"))
            c.unknown_edge_weight = j.at("unknown_edge_weight").get<int>();
        if (j.contains("occupy_goals")) c.occupy_goals = j.at("occupy_goals").get<int>();
        if (j.contains("t_round")) c.t_round = j.at("t_round").get<int>();
        if (j.contains("award_retries")) c.award_retries = j.at("award_retries").get<int>();
        if (j.contains("max_rounds")) c.max_rounds = j.at("max_rounds").get<int>();
        if (j.contains("drop_probability"))
            c.drop_probability = j.at("drop_probability").get<double>();
        if (j.contains("start_positions_a"))
            c.start_positions_a = j.at("start_positions_a").get<std::vector<VertexId>>();
        if (j.contains("start_positions_b"))
            c.start_positions_b = j.at("start_positions_b").get<std::vector<VertexId>>();
        if (j.contains("fault_schedule")) {
            for (const auto& f : j.at("fault_schedule")) {
                ScheduledFault sf;
                sf.step = f.at("step").get<int>();
                const std::string kind = f.at("kind").get<std::string>();
                if (kind == "disable") sf.fault = FaultDisable{f.at("agent").get<AgentId>()};
                else if (kind == "crash") sf.fault = FaultCrash{f.at("agent").get<AgentId>()};
                else if (kind == "drop_rate") sf.fault = FaultDropRate{f.at("rate").get<double>()};
                else throw ConfigError("unknown fault kind: " + kind);
                for (const auto& [key, value] : f.items()) {
                    (void)value;
                    if (key != "step" && key != "kind" && key != "agent" && key != "rate")
                        throw ConfigError("unknown fault key: " + key);
                }
                c.fault_schedule.push_back(sf);
            }
        }
        if (j.contains("out")) rc.out_path = j.at("out").get<std::string>();
    } catch (const ConfigError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return rc;
}

}  // namespace marsim
