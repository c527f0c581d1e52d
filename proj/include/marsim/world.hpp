#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "marsim/core.hpp"

namespace marsim {

// Adjacency-list view shared by the world and by believed graphs.
// adj[v] is sorted by neighbor id; weights are >= 1.
using Adjacency = std::vector<std::vector<std::pair<VertexId, int>>>;

inline std::optional<int> adjacency_weight(const Adjacency& adj, VertexId u, VertexId v) {
    if (u < 0 || u >= static_cast<VertexId>(adj.size())) return std::nullopt;
    for (const auto& [n, w] : adj[u])
        if (n == v) return w;
    return std::nullopt;
}

// Scenario terrain: connected undirected weighted graph with per-vertex values.
struct WorldGraph {
    std::vector<int> values;  // per vertex, in [1, 10]
    Adjacency adj;            // symmetric, no self-loops, no parallel edges

    int vertex_count() const { return static_cast<int>(values.size()); }

    bool valid_vertex(VertexId v) const { return v >= 0 && v < vertex_count(); }

    std::optional<int> edge_weight(VertexId u, VertexId v) const {
        return adjacency_weight(adj, u, v);
    }

    std::vector<std::pair<EdgeKey, int>> edges() const {
        std::vector<std::pair<EdgeKey, int>> out;
        for (VertexId u = 0; u < vertex_count(); ++u)
            for (const auto& [v, w] : adj[u])
                if (u < v) out.emplace_back(EdgeKey{u, v}, w);
        return out;
    }
};

// Builds a WorldGraph from an edge list; validates and symmetrizes.
inline WorldGraph make_world_graph(std::vector<int> values,
                                   const std::vector<std::tuple<VertexId, VertexId, int>>& edges) {
    WorldGraph g;
    g.values = std::move(values);
    const int n = g.vertex_count();
    std::vector<std::map<VertexId, int>> adj(n);
    for (const auto& [u, v, w] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n) throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("self-loop edge");
        if (w < 1) throw std::invalid_argument("edge weight must be >= 1");
        if (adj[u].count(v)) throw std::invalid_argument("parallel edge");
        adj[u][v] = w;
        adj[v][u] = w;
    }
    g.adj.resize(n);
    for (VertexId u = 0; u < n; ++u)
        g.adj[u].assign(adj[u].begin(), adj[u].end());
    return g;
}

// Random connected graph: spanning tree over a shuffled vertex order plus
// extra non-parallel edges. Values uniform in [1,10], weights in [1,9].
inline WorldGraph generate_world(std::mt19937_64& rng, int vertices, int extra_edges) {
    if (vertices < 1) throw std::invalid_argument("vertices must be >= 1");
    auto draw = [&rng](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

    std::vector<int> values(vertices);
    for (auto& v : values) v = 1 + draw(10);

    std::vector<std::tuple<VertexId, VertexId, int>> edges;
    std::vector<std::map<VertexId, int>> seen(vertices);
    for (VertexId v = 1; v < vertices; ++v) {
        VertexId parent = draw(v);
        int w = 1 + draw(9);
        edges.emplace_back(parent, v, w);
        seen[parent][v] = w;
        seen[v][parent] = w;
    }
    int added = 0;
    int attempts = 0;
    const int max_attempts = extra_edges * 20 + 100;
    while (added < extra_edges && attempts < max_attempts && vertices > 2) {
        ++attempts;
        VertexId u = draw(vertices);
        VertexId v = draw(vertices);
        if (u == v || seen[u].count(v)) continue;
        int w = 1 + draw(9);
        edges.emplace_back(u, v, w);
        seen[u][v] = w;
        seen[v][u] = w;
        ++added;
    }
    return make_world_graph(std::move(values), edges);
}

// Per-step attribution of vertices to teams.
struct Coloring {
    std::map<VertexId, Team> color_of;
    int score_a = 0;
    int score_b = 0;

    int score(Team t) const { return t == Team::A ? score_a : score_b; }
};

inline int zone_score(const Coloring& coloring, Team team) { return coloring.score(team); }

// Team with strictly more non-disabled agents standing on `vertex` than the
// other; none on tie or when no non-disabled agent is present. Agents listed
// here are the live (non-crashed) ones.
inline std::optional<Team> dominant_team(const WorldGraph& graph, VertexId vertex,
                                         std::span<const AgentState> agents) {
    if (!graph.valid_vertex(vertex)) throw std::invalid_argument("unknown vertex id");
    int count_a = 0;
    int count_b = 0;
    for (const auto& a : agents) {
        if (a.position != vertex || a.disabled()) continue;
        (a.team == Team::A ? count_a : count_b)++;
    }
    if (count_a > count_b) return Team::A;
    if (count_b > count_a) return Team::B;
    return std::nullopt;
}

// Three-phase zone coloring:
//   DIRECT   - dominant team per vertex.
//   NEIGHBOR - strict majority among DIRECT-colored neighbors, one pass.
//   FILL     - uncolored component whose entire colored border is one team.
inline Coloring color_zones(const WorldGraph& graph, std::span<const AgentState> agents) {
    const int n = graph.vertex_count();
    for (const auto& a : agents)
        if (!graph.valid_vertex(a.position)) throw std::invalid_argument("agent on unknown vertex");

    constexpr int kUncolored = -1;
    std::vector<int> color(n, kUncolored);

    std::vector<int> count_a(n, 0), count_b(n, 0);
    for (const auto& a : agents) {
        if (a.disabled()) continue;
        (a.team == Team::A ? count_a : count_b)[a.position]++;
    }
    for (VertexId v = 0; v < n; ++v) {
        if (count_a[v] > count_b[v]) color[v] = static_cast<int>(Team::A);
        else if (count_b[v] > count_a[v]) color[v] = static_cast<int>(Team::B);
    }
    const std::vector<int> direct = color;

    for (VertexId v = 0; v < n; ++v) {
        if (direct[v] != kUncolored) continue;
        int na = 0, nb = 0;
        for (const auto& [u, w] : graph.adj[v]) {
            (void)w;
            if (direct[u] == static_cast<int>(Team::A)) ++na;
            else if (direct[u] == static_cast<int>(Team::B)) ++nb;
        }
        if (na > nb) color[v] = static_cast<int>(Team::A);
        else if (nb > na) color[v] = static_cast<int>(Team::B);
    }

    std::vector<char> visited(n, 0);
    for (VertexId start = 0; start < n; ++start) {
        if (color[start] != kUncolored || visited[start]) continue;
        std::vector<VertexId> component;
        std::deque<VertexId> queue{start};
        visited[start] = 1;
        bool border_a = false, border_b = false, any_border = false;
        while (!queue.empty()) {
            VertexId v = queue.front();
            queue.pop_front();
            component.push_back(v);
            for (const auto& [u, w] : graph.adj[v]) {
                (void)w;
                if (color[u] == kUncolored) {
                    if (!visited[u]) {
                        visited[u] = 1;
                        queue.push_back(u);
                    }
                } else {
                    any_border = true;
                    (color[u] == static_cast<int>(Team::A) ? border_a : border_b) = true;
                }
            }
        }
        if (any_border && border_a != border_b) {
            int t = static_cast<int>(border_a ? Team::A : Team::B);
            for (VertexId v : component) color[v] = t;
        }
    }

    Coloring result;
    for (VertexId v = 0; v < n; ++v) {
        if (color[v] == kUncolored) continue;
        Team t = static_cast<Team>(color[v]);
        result.color_of[v] = t;
        (t == Team::A ? result.score_a : result.score_b) += graph.values[v];
    }
    return result;
}

}  // namespace marsim
