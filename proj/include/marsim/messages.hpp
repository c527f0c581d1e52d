#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "marsim/core.hpp"
#include "marsim/facts.hpp"
#include "marsim/goals.hpp"

namespace marsim {

struct PerceptShareMsg {
    std::vector<NewFact> facts;
};

struct BidMsg {
    int epoch = 0;
    int round = 0;
    GoalId goal;
    int utility = 0;
};

struct AwardMsg {
    int epoch = 0;
    int round = 0;
    AgentId winner = 0;
    GoalId goal;
    int utility = 0;
};

struct AckMsg {
    std::uint64_t acked_seq = 0;
};

struct RendezvousMsg {
    AgentId repairer = 0;
    AgentId patient = 0;
    VertexId meet = 0;
    AgentId last_mover = 0;
    int step_announced = 0;
};

using Message = std::variant<PerceptShareMsg, BidMsg, AwardMsg, AckMsg, RendezvousMsg>;

inline const char* message_kind(const Message& m) {
    switch (m.index()) {
        case 0: return "percept_share";
        case 1: return "bid";
        case 2: return "award";
        case 3: return "ack";
        default: return "rendezvous";
    }
}

}  // namespace marsim
