#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace marsim {

using VertexId = std::int32_t;
using AgentId = std::int32_t;

enum class Team : std::uint8_t { A, B };

inline Team other_team(Team t) { return t == Team::A ? Team::B : Team::A; }

inline const char* team_name(Team t) { return t == Team::A ? "A" : "B"; }

enum class Role : std::uint8_t { Explorer, Repairer, Sentinel };

inline const char* role_name(Role r) {
    switch (r) {
        case Role::Explorer: return "explorer";
        case Role::Repairer: return "repairer";
        default: return "sentinel";
    }
}

// Ground-truth per-agent record. disabled is derived: health == 0.
struct AgentState {
    AgentId id = 0;
    Team team = Team::A;
    Role role = Role::Explorer;
    VertexId position = 0;
    int energy = 0;
    int max_energy = 0;
    int health = 0;
    int max_health = 0;

    bool disabled() const { return health == 0; }
};

// Undirected edge key, normalized so a < b.
struct EdgeKey {
    VertexId a = 0;
    VertexId b = 0;

    EdgeKey() = default;
    EdgeKey(VertexId u, VertexId v) : a(u < v ? u : v), b(u < v ? v : u) {
        if (u == v) throw std::invalid_argument("self-loop edge");
    }

    auto operator<=>(const EdgeKey&) const = default;
};

// 64-bit mixer (splitmix64 finalizer). Used wherever a decision must be a
// pure function of its inputs rather than of a draw sequence.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a) ^ b);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(mix64(a, b) ^ c);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace marsim
