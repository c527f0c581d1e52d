#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "marsim/core.hpp"
#include "marsim/facts.hpp"
#include "marsim/pathfind.hpp"
#include "marsim/world.hpp"

namespace marsim {

// An agent's local, mergeable view of the world. Vertex values and edge
// weights are grow-only (the terrain is static) and merge toward the
// earliest step_learned; sightings are last-writer-wins by
// (step_seen, lower reporter). Both rules are total orders, so merging is
// idempotent, commutative and associative.
class BeliefStore {
public:
    BeliefStore() = default;
    BeliefStore(AgentId self, int vertex_count) : vertex_count_(vertex_count) {
        self_.id = self;
    }

    int vertex_count() const { return vertex_count_; }
    int current_step() const { return current_step_; }
    const AgentState& self() const { return self_; }

    // bumped on every change; lets planners cache derived structures
    std::uint64_t revision() const { return revision_; }

    // bumped only when edge facts change (the believed graph's inputs)
    std::uint64_t graph_revision() const { return graph_revision_; }

    const std::map<VertexId, VertexValueFact>& vertex_values() const { return vertex_values_; }
    const std::map<EdgeKey, EdgeExistsFact>& known_edges() const { return known_edges_; }
    const std::map<EdgeKey, EdgeWeightFact>& edge_weights() const { return edge_weights_; }
    const std::map<AgentId, AgentSighting>& sightings() const { return sightings_; }

    std::optional<int> value_of(VertexId v) const {
        auto it = vertex_values_.find(v);
        if (it == vertex_values_.end()) return std::nullopt;
        return it->second.value;
    }

    std::optional<AgentSighting> sighting_of(AgentId a) const {
        auto it = sightings_.find(a);
        if (it == sightings_.end()) return std::nullopt;
        return it->second;
    }

    // Applies one fact; returns true when the store changed.
    bool apply(const NewFact& fact) {
        const bool changed = std::visit([this](const auto& f) { return apply_one(f); }, fact);
        if (changed) ++revision_;
        return changed;
    }

    // Ingests this agent's own percept. Returns exactly the facts that were
    // new to the store; these and only these get broadcast.
    std::vector<NewFact> on_percept(const Percept& percept) {
        if (percept.step < current_step_) throw std::invalid_argument("stale percept");
        current_step_ = percept.step;
        self_ = percept.self;
        ++revision_;  // self state moved even when no fact is new

        std::vector<NewFact> fresh;
        auto consider = [&](const NewFact& f) {
            if (apply(f)) fresh.push_back(f);
        };
        consider(AgentSighting{percept.self.id, percept.self.position, percept.self.health,
                               percept.self.energy, percept.step, percept.self.id});
        for (const auto& s : percept.sightings) consider(s);
        for (const auto& e : percept.incident_edges) consider(EdgeExistsFact{e, percept.step});
        if (percept.probed) consider(*percept.probed);
        for (const auto& s : percept.surveyed) consider(s);
        if (percept.failed_move) consider(*percept.failed_move);
        return fresh;
    }

    // Believed graph for planning: every known edge, surveyed weight or the
    // assumed default for unsurveyed ones. Tandem walk over the two sorted
    // maps keeps every neighbor list sorted without temporaries.
    Adjacency believed_graph(const CostModel& model) const {
        Adjacency adj(vertex_count_);
        std::vector<int> degree(vertex_count_, 0);
        for (const auto& [e, f] : known_edges_) {
            (void)f;
            ++degree[e.a];
            ++degree[e.b];
        }
        for (const auto& [e, f] : edge_weights_) {
            (void)f;
            if (!known_edges_.count(e)) {
                ++degree[e.a];
                ++degree[e.b];
            }
        }
        for (VertexId v = 0; v < vertex_count_; ++v) adj[v].reserve(degree[v]);
        auto add = [&adj](const EdgeKey& e, int w) {
            adj[e.a].emplace_back(e.b, w);
            adj[e.b].emplace_back(e.a, w);
        };
        auto ke = known_edges_.begin();
        auto we = edge_weights_.begin();
        while (ke != known_edges_.end() || we != edge_weights_.end()) {
            if (we == edge_weights_.end() ||
                (ke != known_edges_.end() && ke->first < we->first)) {
                add(ke->first, model.unknown_edge_weight);
                ++ke;
            } else {
                add(we->first, we->second.weight);
                if (ke != known_edges_.end() && ke->first == we->first) ++ke;
                ++we;
            }
        }
        return adj;
    }

    bool vertex_value_known(VertexId v) const { return vertex_values_.count(v) > 0; }

    bool edge_weight_known(const EdgeKey& e) const { return edge_weights_.count(e) > 0; }

    bool has_unsurveyed_incident_edge(VertexId v) const {
        for (const auto& [edge, fact] : known_edges_) {
            (void)fact;
            if (edge.a != v && edge.b != v) continue;
            if (!edge_weights_.count(edge)) return true;
        }
        return false;
    }

    friend bool world_view_equal(const BeliefStore& x, const BeliefStore& y) {
        return x.vertex_values_ == y.vertex_values_ && x.known_edges_ == y.known_edges_ &&
               x.edge_weights_ == y.edge_weights_ && x.sightings_ == y.sightings_;
    }

private:
    bool apply_one(const VertexValueFact& f) {
        auto [it, inserted] = vertex_values_.try_emplace(f.vertex, f);
        if (inserted) return true;
        if (it->second.value != f.value) return false;  // conflict: keep existing
        if (f.step_learned < it->second.step_learned) {
            it->second.step_learned = f.step_learned;
            return true;
        }
        return false;
    }

    bool apply_one(const EdgeExistsFact& f) {
        auto [it, inserted] = known_edges_.try_emplace(f.edge, f);
        if (inserted) {
            ++graph_revision_;
            return true;
        }
        if (f.step_learned < it->second.step_learned) {
            it->second.step_learned = f.step_learned;
            return true;
        }
        return false;
    }

    bool apply_one(const EdgeWeightFact& f) {
        auto [it, inserted] = edge_weights_.try_emplace(f.edge, f);
        if (inserted) {
            ++graph_revision_;
            return true;
        }
        if (it->second.weight != f.weight) return false;  // conflict: keep existing
        if (f.step_learned < it->second.step_learned) {
            it->second.step_learned = f.step_learned;
            return true;
        }
        return false;
    }

    bool apply_one(const AgentSighting& s) {
        auto it = sightings_.find(s.agent);
        if (it == sightings_.end()) {
            sightings_.emplace(s.agent, s);
            return true;
        }
        const AgentSighting& have = it->second;
        const bool wins = s.step_seen > have.step_seen ||
                          (s.step_seen == have.step_seen && s.reporter < have.reporter);
        if (!wins) return false;
        it->second = s;
        return true;
    }

    int vertex_count_ = 0;
    int current_step_ = 0;
    std::uint64_t revision_ = 0;
    std::uint64_t graph_revision_ = 0;
    AgentState self_;
    std::map<VertexId, VertexValueFact> vertex_values_;
    std::map<EdgeKey, EdgeExistsFact> known_edges_;
    std::map<EdgeKey, EdgeWeightFact> edge_weights_;
    std::map<AgentId, AgentSighting> sightings_;
};

// Merge of facts received in a PerceptShare. Robust: conflicting static
// facts keep the existing record.
inline void merge_beliefs(BeliefStore& store, const std::vector<NewFact>& facts) {
    for (const auto& f : facts) store.apply(f);
}

}  // namespace marsim
