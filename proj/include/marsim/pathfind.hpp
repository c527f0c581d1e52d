#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "marsim/core.hpp"
#include "marsim/world.hpp"

namespace marsim {

struct CostModel {
    int recharge_rate = 1;       // energy gained per recharge step
    int max_energy = 1;          // Emax
    int unknown_edge_weight = 5; // assumed weight for unsurveyed edges

    CostModel disabled_variant() const {
        CostModel m = *this;
        m.recharge_rate = recharge_rate / 2;
        return m;
    }
};

struct PlanStep {
    bool recharge = false;
    VertexId to = -1;  // move destination when !recharge
};

struct PathPlan {
    VertexId start = 0;
    VertexId goal = 0;
    int final_energy = 0;
    std::vector<PlanStep> actions;

    int steps() const { return static_cast<int>(actions.size()); }
};

// Simulates `plan` from (plan.start, start_energy): energy must cover every
// move, recharges clamp at Emax, and the walk must end on plan.goal.
inline bool validate_plan(const Adjacency& adj, const PathPlan& plan, int start_energy,
                          const CostModel& model) {
    VertexId at = plan.start;
    int energy = start_energy;
    for (const auto& step : plan.actions) {
        if (step.recharge) {
            energy = std::min(energy + model.recharge_rate, model.max_energy);
            continue;
        }
        auto w = adjacency_weight(adj, at, step.to);
        if (!w || energy < *w) return false;
        energy -= *w;
        at = step.to;
    }
    return at == plan.goal && energy == plan.final_energy && energy >= 0 &&
           energy <= model.max_energy;
}

// Breadth-first search over the (vertex, energy) product space. One search
// from a fixed source answers step counts for every vertex; plans are
// reconstructed on demand.
class PathSearch {
public:
    PathSearch(const Adjacency& adj, VertexId start, int start_energy, const CostModel& model)
        : adj_(adj),
          model_(model),
          start_(start),
          start_energy_(start_energy),
          n_(static_cast<int>(adj.size())),
          width_(model.max_energy + 1) {
        if (start < 0 || start >= n_) throw std::invalid_argument("start vertex out of range");
        if (start_energy < 0 || start_energy > model.max_energy)
            throw std::invalid_argument("start energy out of range");
        if (model.recharge_rate < 0 || model.max_energy < 1)
            throw std::invalid_argument("bad cost model");
        run();
    }

    // Minimum plan step count from the source to `v`, or -1 if unreachable.
    int min_steps(VertexId v) const { return vertex_dist_[v]; }

    const std::vector<int>& all_min_steps() const { return vertex_dist_; }

    // Minimum-step plan to `goal`, tie-broken by maximum final energy then
    // lexicographically smallest vertex sequence. nullopt when unreachable.
    std::optional<PathPlan> extract_plan(VertexId goal) const {
        if (goal < 0 || goal >= n_) throw std::invalid_argument("goal vertex out of range");
        const int total = vertex_dist_[goal];
        if (total < 0) return std::nullopt;

        int best_energy = -1;
        for (int e = model_.max_energy; e >= 0; --e) {
            if (dist_[state(goal, e)] == total) {
                best_energy = e;
                break;
            }
        }

        PathPlan plan;
        plan.start = start_;
        plan.goal = goal;
        plan.final_energy = best_energy;
        if (total == 0) return plan;

        const auto rdist = reverse_distances(goal, best_energy);
        VertexId v = start_;
        int e = start_energy_;
        for (int remaining = total; remaining > 0; --remaining) {
            // candidate successors ordered by next vertex id; recharge keeps v
            VertexId best_vertex = std::numeric_limits<VertexId>::max();
            PlanStep chosen;
            int chosen_e = -1;
            int re = std::min(e + model_.recharge_rate, model_.max_energy);
            if (rdist[state(v, re)] == remaining - 1 && v < best_vertex) {
                best_vertex = v;
                chosen = PlanStep{true, -1};
                chosen_e = re;
            }
            for (const auto& [u, w] : adj_[v]) {
                if (e < w) continue;
                if (rdist[state(u, e - w)] == remaining - 1 && u < best_vertex) {
                    best_vertex = u;
                    chosen = PlanStep{false, u};
                    chosen_e = e - w;
                }
            }
            plan.actions.push_back(chosen);
            if (!chosen.recharge) v = chosen.to;
            e = chosen_e;
        }
        return plan;
    }

private:
    int state(VertexId v, int e) const { return v * width_ + e; }

    void run() {
        dist_.assign(static_cast<std::size_t>(n_) * width_, -1);
        vertex_dist_.assign(n_, -1);
        std::vector<std::pair<VertexId, int>> queue;
        queue.reserve(dist_.size());
        dist_[state(start_, start_energy_)] = 0;
        vertex_dist_[start_] = 0;
        queue.emplace_back(start_, start_energy_);
        const int r = model_.recharge_rate;
        const int emax = model_.max_energy;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const auto [v, e] = queue[head];
            const int base = v * width_;
            const int d = dist_[base + e];
            const int re = std::min(e + r, emax);
            if (dist_[base + re] < 0) {
                dist_[base + re] = d + 1;
                queue.emplace_back(v, re);
            }
            for (const auto& [u, w] : adj_[v]) {
                if (e < w) continue;
                const int ms = u * width_ + e - w;
                if (dist_[ms] < 0) {
                    dist_[ms] = d + 1;
                    if (vertex_dist_[u] < 0) vertex_dist_[u] = d + 1;
                    queue.emplace_back(u, e - w);
                }
            }
        }
    }

    // BFS over reversed transitions from (goal, goal_energy).
    std::vector<int> reverse_distances(VertexId goal, int goal_energy) const {
        std::vector<int> rdist(dist_.size(), -1);
        std::vector<std::pair<VertexId, int>> queue;
        queue.reserve(dist_.size());
        rdist[state(goal, goal_energy)] = 0;
        queue.emplace_back(goal, goal_energy);
        const int r = model_.recharge_rate;
        const int emax = model_.max_energy;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const auto [v, e] = queue[head];
            const int d = rdist[v * width_ + e];
            auto visit = [&](VertexId pv, int pe) {
                const int ps = pv * width_ + pe;
                if (rdist[ps] < 0) {
                    rdist[ps] = d + 1;
                    queue.emplace_back(pv, pe);
                }
            };
            // recharge predecessors: states at v whose recharge lands on e
            if (e == emax) {
                for (int pe = std::max(0, emax - r); pe <= emax; ++pe) visit(v, pe);
            } else if (r > 0 && e - r >= 0) {
                visit(v, e - r);
            }
            // move predecessors: neighbor u entered v paying w
            for (const auto& [u, w] : adj_[v]) {
                if (e + w <= emax) visit(u, e + w);
            }
        }
        return rdist;
    }

    const Adjacency& adj_;
    CostModel model_;
    VertexId start_;
    int start_energy_;
    int n_;
    int width_;
    std::vector<int> dist_;
    std::vector<int> vertex_dist_;
};

// Minimum-step plan on the believed graph, or nullopt when the goal is
// unreachable. Invalid vertices or energy throw.
inline std::optional<PathPlan> plan_path(const Adjacency& adj, VertexId start, int start_energy,
                                         VertexId goal, const CostModel& model) {
    PathSearch search(adj, start, start_energy, model);
    if (goal < 0 || goal >= static_cast<VertexId>(adj.size()))
        throw std::invalid_argument("goal vertex out of range");
    return search.extract_plan(goal);
}

enum class LastMover : std::uint8_t { Repairer, Disabled };

struct MeetingPoint {
    VertexId meet = -1;
    int steps_repairer = 0;
    int steps_disabled = 0;
    LastMover last_mover = LastMover::Repairer;
};

// Meeting vertex minimizing max(stepsRepairer, stepsDisabled); ties by the
// smaller step sum, then the smaller vertex id. The disabled side plans with
// a halved (floored) recharge rate. This overload reuses an existing search
// from the repairer's position.
inline std::optional<MeetingPoint> meeting_point(const Adjacency& adj,
                                                 const PathSearch& repairer_search,
                                                 VertexId disabled_pos, int disabled_energy,
                                                 const CostModel& model) {
    PathSearch dis(adj, disabled_pos, disabled_energy, model.disabled_variant());
    std::optional<MeetingPoint> best;
    for (VertexId m = 0; m < static_cast<VertexId>(adj.size()); ++m) {
        const int sr = repairer_search.min_steps(m);
        const int sd = dis.min_steps(m);
        if (sr < 0 || sd < 0) continue;
        const int worst = std::max(sr, sd);
        const int sum = sr + sd;
        if (best) {
            const int bworst = std::max(best->steps_repairer, best->steps_disabled);
            const int bsum = best->steps_repairer + best->steps_disabled;
            if (worst > bworst) continue;
            if (worst == bworst && sum > bsum) continue;
            if (worst == bworst && sum == bsum && m > best->meet) continue;
        }
        best = MeetingPoint{m, sr, sd,
                            sd > sr ? LastMover::Disabled : LastMover::Repairer};
    }
    return best;
}

inline std::optional<MeetingPoint> meeting_point(const Adjacency& adj, VertexId repairer_pos,
                                                 int repairer_energy, VertexId disabled_pos,
                                                 int disabled_energy, const CostModel& model) {
    PathSearch rep(adj, repairer_pos, repairer_energy, model);
    return meeting_point(adj, rep, disabled_pos, disabled_energy, model);
}

// First positive-score vertex in ascending plan-step order from `pos`; ties
// by higher score, then lower vertex id.
inline std::optional<VertexId> best_first_target(const Adjacency& adj, VertexId pos, int energy,
                                                 const std::function<int(VertexId)>& score,
                                                 const CostModel& model) {
    PathSearch search(adj, pos, energy, model);
    std::optional<VertexId> best;
    int best_steps = 0;
    int best_score = 0;
    for (VertexId v = 0; v < static_cast<VertexId>(adj.size()); ++v) {
        const int steps = search.min_steps(v);
        if (steps < 0) continue;
        const int s = score(v);
        if (s <= 0) continue;
        if (!best || steps < best_steps || (steps == best_steps && s > best_score)) {
            best = v;
            best_steps = steps;
            best_score = s;
        }
    }
    return best;
}

}  // namespace marsim
