#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "marsim/core.hpp"

namespace marsim {

// Ascending enum order doubles as descending auction priority.
enum class GoalKind : std::uint8_t { Repair = 0, Probe = 1, Survey = 2, Occupy = 3 };

inline const char* goal_kind_name(GoalKind k) {
    switch (k) {
        case GoalKind::Repair: return "repair";
        case GoalKind::Probe: return "probe";
        case GoalKind::Survey: return "survey";
        default: return "occupy";
    }
}

// Pure function of (kind, target): two agents generating the same goal
// produce identical ids. Target is a vertex, or an agent for Repair.
struct GoalId {
    GoalKind kind = GoalKind::Probe;
    std::int32_t target = 0;

    auto operator<=>(const GoalId&) const = default;

    std::string to_string() const {
        return std::string(goal_kind_name(kind)) + ":" + std::to_string(target);
    }
};

struct Goal {
    GoalId id;
    int base_value = 0;
};

}  // namespace marsim
