#pragma once

#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "marsim/sim.hpp"

namespace marsim {

inline constexpr int kLogFormatVersion = 1;

using ojson = nlohmann::ordered_json;

inline std::optional<GoalId> parse_goal_id(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return std::nullopt;
    const std::string kind = text.substr(0, colon);
    GoalId id;
    if (kind == "repair") id.kind = GoalKind::Repair;
    else if (kind == "probe") id.kind = GoalKind::Probe;
    else if (kind == "survey") id.kind = GoalKind::Survey;
    else if (kind == "occupy") id.kind = GoalKind::Occupy;
    else return std::nullopt;
    try {
        id.target = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return id;
}

inline ojson step_record_to_json(const StepRecord& r) {
    ojson j;
    j["type"] = "step";
    j["step"] = r.step;
    ojson actions = ojson::array();
    for (const auto& a : r.actions) {
        ojson e;
        e["agent"] = a.agent;
        e["kind"] = action_kind_name(a.action.kind);
        if (a.action.kind == ActionKind::Goto) e["to"] = a.action.to;
        if (a.action.kind == ActionKind::Repair) e["target"] = a.action.target;
        e["success"] = a.success;
        e["issued"] = a.issued;
        actions.push_back(std::move(e));
    }
    j["actions"] = std::move(actions);
    ojson agents = ojson::array();
    for (const auto& a : r.agents) {
        ojson e;
        e["id"] = a.id;
        e["position"] = a.position;
        e["energy"] = a.energy;
        e["health"] = a.health;
        e["crashed"] = a.crashed;
        if (a.assigned) e["assigned"] = a.assigned->to_string();
        agents.push_back(std::move(e));
    }
    j["agents"] = std::move(agents);
    ojson rendezvous = ojson::array();
    for (const auto& rv : r.rendezvous) {
        ojson e;
        e["repairer"] = rv.repairer;
        e["patient"] = rv.patient;
        e["meet"] = rv.meet;
        e["steps_repairer"] = rv.steps_repairer;
        e["steps_disabled"] = rv.steps_disabled;
        rendezvous.push_back(std::move(e));
    }
    j["rendezvous"] = std::move(rendezvous);
    j["colored_a"] = r.colored_a;
    j["colored_b"] = r.colored_b;
    j["step_score_a"] = r.step_score_a;
    j["step_score_b"] = r.step_score_b;
    j["cum_score_a"] = r.cum_score_a;
    j["cum_score_b"] = r.cum_score_b;
    return j;
}

// Line-delimited log: header, one object per step, then a summary line.
// Field order is stable; determinism tests compare bytes.
inline std::string match_log_to_jsonl(const MatchLog& log) {
    std::ostringstream out;
    ojson header;
    header["type"] = "header";
    header["format_version"] = kLogFormatVersion;
    header["seed"] = log.seed;
    header["vertices"] = log.vertices;
    header["team_size"] = log.team_size;
    out << header.dump() << '\n';
    for (const auto& r : log.records) out << step_record_to_json(r).dump() << '\n';
    ojson summary;
    summary["type"] = "summary";
    summary["steps"] = log.summary.steps;
    summary["score_a"] = log.summary.score_a;
    summary["score_b"] = log.summary.score_b;
    summary["winner"] = log.summary.winner;
    out << summary.dump() << '\n';
    return out.str();
}

inline StepRecord step_record_from_json(const ojson& j) {
    StepRecord r;
    r.step = j.at("step").get<int>();
    for (const auto& e : j.at("actions")) {
        ActionOutcome oc;
        oc.agent = e.at("agent").get<AgentId>();
        const std::string kind = e.at("kind").get<std::string>();
        if (kind == "goto") oc.action = Action::goto_vertex(e.at("to").get<VertexId>());
        else if (kind == "probe") oc.action = Action::probe();
        else if (kind == "survey") oc.action = Action::survey();
        else if (kind == "recharge") oc.action = Action::recharge();
        else if (kind == "repair") oc.action = Action::repair(e.at("target").get<AgentId>());
        else oc.action = Action::skip();
        oc.success = e.at("success").get<bool>();
        oc.issued = e.at("issued").get<bool>();
        r.actions.push_back(oc);
    }
    for (const auto& e : j.at("agents")) {
        AgentSnapshot s;
        s.id = e.at("id").get<AgentId>();
        s.position = e.at("position").get<VertexId>();
        s.energy = e.at("energy").get<int>();
        s.health = e.at("health").get<int>();
        s.crashed = e.at("crashed").get<bool>();
        if (e.contains("assigned")) s.assigned = parse_goal_id(e.at("assigned").get<std::string>());
        r.agents.push_back(s);
    }
    for (const auto& e : j.at("rendezvous")) {
        RendezvousRecord rv;
        rv.repairer = e.at("repairer").get<AgentId>();
        rv.patient = e.at("patient").get<AgentId>();
        rv.meet = e.at("meet").get<VertexId>();
        rv.steps_repairer = e.at("steps_repairer").get<int>();
        rv.steps_disabled = e.at("steps_disabled").get<int>();
        r.rendezvous.push_back(rv);
    }
    r.colored_a = j.at("colored_a").get<int>();
    r.colored_b = j.at("colored_b").get<int>();
    r.step_score_a = j.at("step_score_a").get<int>();
    r.step_score_b = j.at("step_score_b").get<int>();
    r.cum_score_a = j.at("cum_score_a").get<int>();
    r.cum_score_b = j.at("cum_score_b").get<int>();
    return r;
}

inline MatchLog match_log_from_jsonl(std::istream& in) {
    MatchLog log;
    std::string line;
    bool saw_header = false, saw_summary = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ojson j = ojson::parse(line);
        const std::string type = j.at("type").get<std::string>();
        if (type == "header") {
            if (j.at("format_version").get<int>() != kLogFormatVersion)
                throw std::invalid_argument("unsupported log format version");
            log.seed = j.at("seed").get<std::uint64_t>();
            log.vertices = j.at("vertices").get<int>();
            log.team_size = j.at("team_size").get<int>();
            saw_header = true;
        } else if (type == "step") {
            log.records.push_back(step_record_from_json(j));
        } else if (type == "summary") {
            log.summary.steps = j.at("steps").get<int>();
            log.summary.score_a = j.at("score_a").get<int>();
            log.summary.score_b = j.at("score_b").get<int>();
            log.summary.winner = j.at("winner").get<std::string>();
            saw_summary = true;
        }
    }
    if (!saw_header || !saw_summary) throw std::invalid_argument("incomplete match log");
    return log;
}

}  // namespace marsim
