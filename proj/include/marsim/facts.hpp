#pragma once

#include <compare>
#include <optional>
#include <variant>
#include <vector>

#include "marsim/core.hpp"

namespace marsim {

// Last-writer-wins record of one agent as seen by some reporter.
struct AgentSighting {
    AgentId agent = 0;
    VertexId vertex = 0;
    int health = 0;
    int energy = 0;
    int step_seen = 0;
    AgentId reporter = 0;

    auto operator<=>(const AgentSighting&) const = default;
};

struct VertexValueFact {
    VertexId vertex = 0;
    int value = 0;
    int step_learned = 0;

    auto operator<=>(const VertexValueFact&) const = default;
};

struct EdgeExistsFact {
    EdgeKey edge;
    int step_learned = 0;

    auto operator<=>(const EdgeExistsFact&) const = default;
};

struct EdgeWeightFact {
    EdgeKey edge;
    int weight = 0;
    int step_learned = 0;

    auto operator<=>(const EdgeWeightFact&) const = default;
};

using NewFact = std::variant<VertexValueFact, EdgeExistsFact, EdgeWeightFact, AgentSighting>;

// The environment's per-step observation packet for one agent.
struct Percept {
    AgentId agent = 0;
    int step = 0;
    AgentState self;
    std::vector<AgentSighting> sightings;      // same + adjacent vertices, id order
    std::vector<EdgeKey> incident_edges;       // existence only
    std::optional<VertexValueFact> probed;     // own probe result this step
    std::vector<EdgeWeightFact> surveyed;      // own survey results this step
    std::optional<EdgeWeightFact> failed_move; // weight that made a move fail
    int team_score = 0;
};

}  // namespace marsim
