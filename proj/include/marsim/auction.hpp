#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "marsim/beliefs.hpp"
#include "marsim/core.hpp"
#include "marsim/goals.hpp"
#include "marsim/netsim.hpp"
#include "marsim/pathfind.hpp"

namespace marsim {

struct Bid {
    AgentId bidder = 0;
    GoalId goal;
    int utility = 0;
    int round = 0;
};

// --- goal generation ---------------------------------------------------------

inline constexpr int kRepairBaseValue = 20;
inline constexpr int kProbeBaseValue = 10;
inline constexpr int kSurveyBaseValue = 6;

// Per-vertex flags derived from one pass over the store; shared by goal
// generation and exploration scoring.
struct VertexKnowledge {
    std::vector<char> known;       // any evidence the vertex exists
    std::vector<char> unsurveyed;  // has an incident edge of unknown weight

    explicit VertexKnowledge(const BeliefStore& beliefs)
        : known(beliefs.vertex_count(), 0), unsurveyed(beliefs.vertex_count(), 0) {
        const int n = beliefs.vertex_count();
        auto mark = [&](VertexId v) {
            if (v >= 0 && v < n) known[v] = 1;
        };
        mark(beliefs.self().position);
        for (const auto& [a, s] : beliefs.sightings()) {
            (void)a;
            mark(s.vertex);
        }
        for (const auto& [e, f] : beliefs.known_edges()) {
            (void)f;
            mark(e.a);
            mark(e.b);
            if (!beliefs.edge_weights().count(e)) {
                if (e.a < n) unsurveyed[e.a] = 1;
                if (e.b < n) unsurveyed[e.b] = 1;
            }
        }
        for (const auto& [e, f] : beliefs.edge_weights()) {
            (void)f;
            mark(e.a);
            mark(e.b);
        }
        for (const auto& [v, f] : beliefs.vertex_values()) {
            (void)f;
            mark(v);
        }
    }
};

// Deterministic goal list: Repair for believed-disabled teammates, Probe for
// unvalued known vertices, Survey for vertices with an unsurveyed incident
// edge, Occupy for the k highest-known-value vertices. Ordered by
// (kind priority, target id).
inline std::vector<Goal> generate_goals(const BeliefStore& beliefs,
                                        const std::vector<AgentState>& team_agents,
                                        int occupy_count) {
    std::vector<Goal> goals;
    for (const auto& a : team_agents) {
        if (a.disabled()) goals.push_back({GoalId{GoalKind::Repair, a.id}, kRepairBaseValue});
    }
    std::sort(goals.begin(), goals.end(),
              [](const Goal& x, const Goal& y) { return x.id < y.id; });
    const VertexKnowledge knowledge(beliefs);
    const int n = beliefs.vertex_count();
    for (VertexId v = 0; v < n; ++v) {
        if (knowledge.known[v] && !beliefs.vertex_value_known(v))
            goals.push_back({GoalId{GoalKind::Probe, v}, kProbeBaseValue});
    }
    for (VertexId v = 0; v < n; ++v) {
        if (knowledge.unsurveyed[v])
            goals.push_back({GoalId{GoalKind::Survey, v}, kSurveyBaseValue});
    }
    std::vector<std::pair<int, VertexId>> valued;
    for (const auto& [v, f] : beliefs.vertex_values()) valued.emplace_back(f.value, v);
    std::sort(valued.begin(), valued.end(),
              [](const auto& x, const auto& y) { return x.first != y.first ? x.first > y.first
                                                                           : x.second < y.second; });
    std::vector<Goal> occupy;
    for (int i = 0; i < occupy_count && i < static_cast<int>(valued.size()); ++i)
        occupy.push_back({GoalId{GoalKind::Occupy, valued[i].second}, valued[i].first});
    std::sort(occupy.begin(), occupy.end(),
              [](const Goal& x, const Goal& y) { return x.id < y.id; });
    goals.insert(goals.end(), occupy.begin(), occupy.end());
    return goals;  // blocks are emitted in (kind, target) order already
}

inline int role_multiplier(Role role, GoalKind kind) {
    if (role == Role::Explorer && (kind == GoalKind::Probe || kind == GoalKind::Survey)) return 2;
    if (role == Role::Sentinel && kind == GoalKind::Occupy) return 2;
    return 1;
}

// Utilities for a whole goal list from one search of the believed graph.
// nullopt entries are role-ineligible or unreachable goals. This overload
// reuses a caller-provided search from the agent's position.
inline std::vector<std::optional<int>> compute_utilities(const AgentState& agent,
                                                         const std::vector<Goal>& goals,
                                                         const BeliefStore& beliefs,
                                                         const CostModel& model,
                                                         const Adjacency& adj,
                                                         const PathSearch& search) {
    std::vector<std::optional<int>> out(goals.size());
    if (agent.disabled()) return out;
    if (agent.position < 0 || agent.position >= static_cast<VertexId>(adj.size())) return out;
    for (std::size_t i = 0; i < goals.size(); ++i) {
        const Goal& g = goals[i];
        if (g.id.kind == GoalKind::Repair) {
            if (agent.role != Role::Repairer) continue;
            auto patient = beliefs.sighting_of(g.id.target);
            if (!patient) continue;
            auto meet = meeting_point(adj, search, patient->vertex, patient->energy, model);
            if (!meet) continue;
            out[i] = g.base_value - meet->steps_repairer;
            continue;
        }
        const VertexId target = g.id.target;
        if (target < 0 || target >= static_cast<VertexId>(adj.size())) continue;
        const int steps = search.min_steps(target);
        if (steps < 0) continue;
        out[i] = role_multiplier(agent.role, g.id.kind) * g.base_value - steps;
    }
    return out;
}

inline std::vector<std::optional<int>> compute_utilities(const AgentState& agent,
                                                         const std::vector<Goal>& goals,
                                                         const BeliefStore& beliefs,
                                                         const CostModel& model) {
    std::vector<std::optional<int>> out(goals.size());
    if (agent.disabled()) return out;
    const Adjacency adj = beliefs.believed_graph(model);
    if (agent.position < 0 || agent.position >= static_cast<VertexId>(adj.size())) return out;
    PathSearch search(adj, agent.position, agent.energy, model);
    return compute_utilities(agent, goals, beliefs, model, adj, search);
}

inline std::optional<int> compute_utility(const AgentState& agent, const Goal& goal,
                                          const BeliefStore& beliefs, const CostModel& model) {
    return compute_utilities(agent, {goal}, beliefs, model)[0];
}

// --- winner determination ----------------------------------------------------

// Highest utility wins; ties to the lower bidder id, then the lower goal id.
// Pure: any two agents holding the same bid set compute the same winner.
inline std::optional<std::pair<AgentId, GoalId>> winner_determination(
    const std::vector<Bid>& bids) {
    if (bids.empty()) return std::nullopt;
    const Bid* best = nullptr;
    for (const auto& b : bids) {
        if (b.round != bids.front().round)
            throw std::invalid_argument("winner_determination: mixed rounds");
        if (!best || b.utility > best->utility ||
            (b.utility == best->utility &&
             (b.bidder < best->bidder ||
              (b.bidder == best->bidder && b.goal < best->goal))))
            best = &b;
    }
    return std::make_pair(best->bidder, best->goal);
}

// --- epoch state machine -------------------------------------------------------

enum class AuctionPhase { Bidding, Awarding, Done };

struct AssignmentLedger {
    std::map<GoalId, AgentId> owner;
    std::set<AgentId> assigned_agents;
    int round = 0;
    AuctionPhase phase = AuctionPhase::Bidding;
};

struct AuctionConstants {
    int t_round = 2;        // ticks an agent waits out a round
    int award_retries = 2;  // consecutive rounds an award is re-broadcast
    int max_rounds = 8;     // Rmax
};

struct TimerExpired {};
struct ReceivedEnvelope {
    Envelope envelope;
};
using AuctionEvent = std::variant<TimerExpired, ReceivedEnvelope>;

struct OutgoingMessage {
    std::optional<AgentId> dst;  // nullopt = broadcast
    Message payload;
};

// One agent's view of one per-step auction epoch. Driven by delivered
// envelopes and one timer event per delivery tick; emits the messages to
// send. Received awards are authoritative over locally computed winners.
class AuctionMachine {
public:
    AuctionMachine(AgentId self, int epoch, std::vector<AgentId> teammates,
                   std::map<GoalId, int> utilities, AuctionConstants consts)
        : self_(self), epoch_(epoch), teammates_(std::move(teammates)), consts_(consts) {
        for (const auto& [goal, value] : utilities)
            if (value > 0) ranked_goals_.emplace_back(goal, value);  // no bid below 1
        std::sort(ranked_goals_.begin(), ranked_goals_.end(),
                  [](const auto& x, const auto& y) {
                      return x.second != y.second ? x.second > y.second : x.first < y.first;
                  });
        ledger_.round = 0;
    }

    // Opens round 1; returns the initial broadcast (if any).
    std::vector<OutgoingMessage> start() { return begin_round(1); }

    std::vector<OutgoingMessage> on_event(const AuctionEvent& event) {
        return std::visit([this](const auto& e) { return handle(e); }, event);
    }

    const AssignmentLedger& ledger() const { return ledger_; }
    AuctionPhase phase() const { return ledger_.phase; }
    bool done() const { return ledger_.phase == AuctionPhase::Done; }
    std::optional<GoalId> my_goal() const {
        auto it = agent_goal_.find(self_);
        if (it == agent_goal_.end() || !claims_.at(it->second).awarded) return std::nullopt;
        return it->second;
    }

private:
    struct Claim {
        AgentId agent = 0;
        int utility = 0;
        int round = 0;
        bool awarded = false;  // true: from an Award (or self-award); false: local prediction
    };

    std::vector<OutgoingMessage> handle(const TimerExpired&) {
        std::vector<OutgoingMessage> out;
        if (ledger_.phase == AuctionPhase::Done && round_ > consts_.max_rounds) return out;
        ++ticks_in_round_;
        const bool heard_all = unheard_count() == 0;
        if (heard_all || ticks_in_round_ >= consts_.t_round) return close_round();
        return out;
    }

    std::vector<OutgoingMessage> handle(const ReceivedEnvelope& r) {
        const Envelope& env = r.envelope;
        if (const auto* bid = std::get_if<BidMsg>(&env.payload)) {
            if (bid->epoch != epoch_) return {};
            if (bid->round >= round_) {
                bids_by_round_[bid->round].push_back(
                    Bid{env.src, bid->goal, bid->utility, bid->round});
                heard_.insert(env.src);
            }
            return {};
        }
        if (const auto* award = std::get_if<AwardMsg>(&env.payload)) {
            if (award->epoch != epoch_) return {};
            heard_.insert(env.src);
            apply_claim(award->goal,
                        Claim{award->winner, award->utility, award->round, true});
            return {};
        }
        return {};  // other payloads are not this machine's; ignored
    }

    int unheard_count() const {
        int n = 0;
        for (AgentId t : teammates_)
            if (!heard_.count(t) && !ledger_.assigned_agents.count(t)) ++n;
        return n;
    }

    std::vector<OutgoingMessage> close_round() {
        std::vector<Bid> bids = bids_by_round_[round_];
        if (my_bid_ && my_bid_->round == round_) bids.push_back(*my_bid_);
        bids_by_round_.erase(round_);

        if (auto winner = winner_determination(bids)) {
            const auto [agent, goal] = *winner;
            int utility = 0;
            for (const auto& b : bids)
                if (b.bidder == agent && b.goal == goal) utility = b.utility;
            if (agent == self_) {
                apply_claim(goal, Claim{self_, utility, round_, true});
                award_rounds_left_ = consts_.award_retries;
            } else {
                apply_claim(goal, Claim{agent, utility, round_, false});
            }
        }
        return begin_round(round_ + 1);
    }

    std::vector<OutgoingMessage> begin_round(int r) {
        round_ = r;
        ledger_.round = r;
        ticks_in_round_ = 0;
        heard_.clear();
        my_bid_.reset();
        std::vector<OutgoingMessage> out;
        if (r > consts_.max_rounds) {
            ledger_.phase = AuctionPhase::Done;
            return out;
        }
        auto buffered = bids_by_round_.find(r);  // senders already ahead of us
        if (buffered != bids_by_round_.end())
            for (const auto& b : buffered->second) heard_.insert(b.bidder);
        if (my_goal()) {
            if (award_rounds_left_ > 0) {
                --award_rounds_left_;
                ledger_.phase = AuctionPhase::Awarding;
                const GoalId goal = *my_goal();
                out.push_back(OutgoingMessage{
                    std::nullopt,
                    AwardMsg{epoch_, r, self_, goal, claims_.at(goal).utility}});
            } else {
                ledger_.phase = AuctionPhase::Done;
            }
            return out;
        }
        // unassigned: bid the best unowned goal, if any
        for (const auto& [goal, value] : ranked_goals_) {
            if (claims_.count(goal)) continue;
            ledger_.phase = AuctionPhase::Bidding;
            my_bid_ = Bid{self_, goal, value, r};
            out.push_back(OutgoingMessage{std::nullopt, BidMsg{epoch_, r, goal, value}});
            return out;
        }
        ledger_.phase = AuctionPhase::Done;
        return out;
    }

    // Claim precedence: an award beats a prediction; within a kind the
    // winner_determination ordering decides. A claimant abandoning an older,
    // weaker claim frees that goal.
    void apply_claim(const GoalId& goal, const Claim& incoming) {
        auto held = agent_goal_.find(incoming.agent);
        if (held != agent_goal_.end() && held->second != goal) {
            const Claim& old = claims_.at(held->second);
            const bool stronger = (incoming.awarded && !old.awarded) ||
                                  (incoming.awarded == old.awarded && incoming.round > old.round);
            if (!stronger) return;
            remove_claim(held->second);
        }
        auto existing = claims_.find(goal);
        if (existing != claims_.end()) {
            const Claim& old = existing->second;
            if (old.agent != incoming.agent) {
                if (old.awarded && !incoming.awarded) return;
                if (old.awarded == incoming.awarded && !claim_beats(incoming, old)) return;
                remove_claim(goal);
            } else {
                existing->second.awarded = old.awarded || incoming.awarded;
                existing->second.round = std::max(old.round, incoming.round);
                return;
            }
        }
        claims_[goal] = incoming;
        agent_goal_[incoming.agent] = goal;
        ledger_.owner[goal] = incoming.agent;
        ledger_.assigned_agents.insert(incoming.agent);
    }

    static bool claim_beats(const Claim& x, const Claim& y) {
        if (x.utility != y.utility) return x.utility > y.utility;
        return x.agent < y.agent;
    }

    void remove_claim(const GoalId& goal) {
        auto it = claims_.find(goal);
        if (it == claims_.end()) return;
        ledger_.assigned_agents.erase(it->second.agent);
        ledger_.owner.erase(goal);
        agent_goal_.erase(it->second.agent);
        claims_.erase(it);
    }

    AgentId self_;
    int epoch_;
    std::vector<AgentId> teammates_;
    AuctionConstants consts_;
    std::vector<std::pair<GoalId, int>> ranked_goals_;  // utility desc, goal id asc

    int round_ = 0;
    int ticks_in_round_ = 0;
    std::set<AgentId> heard_;
    std::map<int, std::vector<Bid>> bids_by_round_;
    std::optional<Bid> my_bid_;
    int award_rounds_left_ = 0;

    std::map<GoalId, Claim> claims_;
    std::map<AgentId, GoalId> agent_goal_;
    AssignmentLedger ledger_;
};

// Advances a set of machines over the harness until every one is Done (plus
// one drain tick for in-flight corrections) or the tick budget runs out.
// Machines are keyed by agent id; ticks continue from `tick`.
inline int run_epoch(MessageHarness& harness, std::map<AgentId, AuctionMachine>& machines,
                     int tick, int max_ticks) {
    auto flush = [&](AgentId src, const std::vector<OutgoingMessage>& out) {
        for (const auto& m : out) harness.send(src, m.dst, m.payload);
    };
    for (auto& [id, machine] : machines) flush(id, machine.start());
    for (int used = 0; used < max_ticks; ++used) {
        ++tick;
        auto delivered = harness.deliver_tick(tick);
        for (auto& [id, machine] : machines) {
            auto it = delivered.find(id);
            if (it != delivered.end())
                for (const auto& env : it->second)
                    flush(id, machine.on_event(ReceivedEnvelope{env}));
        }
        bool all_done = true;
        for (auto& [id, machine] : machines) {
            flush(id, machine.on_event(TimerExpired{}));
            all_done = all_done && machine.done();
        }
        if (all_done) {
            ++tick;
            auto drain = harness.deliver_tick(tick);
            for (auto& [id, machine] : machines) {
                auto it = drain.find(id);
                if (it != drain.end())
                    for (const auto& env : it->second)
                        machine.on_event(ReceivedEnvelope{env});
            }
            break;
        }
    }
    return tick;
}

// --- centralized oracles -----------------------------------------------------

struct UtilityMatrix {
    int agents = 0;
    int goals = 0;
    std::vector<std::vector<std::optional<int>>> u;  // agents x goals

    static UtilityMatrix make(int agents, int goals) {
        UtilityMatrix m;
        m.agents = agents;
        m.goals = goals;
        m.u.assign(agents, std::vector<std::optional<int>>(goals));
        return m;
    }
};

struct AssignmentResult {
    std::map<int, int> agent_goal;  // row -> column
    int total = 0;
};

// Repeatedly picks the globally maximum remaining (utility, lower agent,
// lower goal) entry and removes its row and column.
inline AssignmentResult greedy_assignment_oracle(const UtilityMatrix& m) {
    AssignmentResult result;
    std::vector<char> row_used(m.agents, 0), col_used(m.goals, 0);
    while (true) {
        int best_a = -1, best_g = -1;
        for (int a = 0; a < m.agents; ++a) {
            if (row_used[a]) continue;
            for (int g = 0; g < m.goals; ++g) {
                if (col_used[g] || !m.u[a][g]) continue;
                if (best_a < 0 || *m.u[a][g] > *m.u[best_a][best_g]) {
                    best_a = a;
                    best_g = g;
                }
            }
        }
        if (best_a < 0) break;
        row_used[best_a] = 1;
        col_used[best_g] = 1;
        result.agent_goal[best_a] = best_g;
        result.total += *m.u[best_a][best_g];
    }
    return result;
}

// Exact maximum-total assignment via subset DP over the smaller dimension.
// Test-scale only; throws std::length_error above the size cap.
inline AssignmentResult optimal_assignment_oracle(const UtilityMatrix& m) {
    const bool transpose = m.goals > m.agents;
    const int rows = transpose ? m.goals : m.agents;
    const int cols = transpose ? m.agents : m.goals;
    if (cols > 10 || rows > 64) throw std::length_error("optimal oracle: matrix too large");
    auto at = [&](int r, int c) { return transpose ? m.u[c][r] : m.u[r][c]; };

    const int full = 1 << cols;
    constexpr int kNegInf = std::numeric_limits<int>::min() / 2;
    std::vector<std::vector<int>> dp(rows + 1, std::vector<int>(full, kNegInf));
    dp[0][0] = 0;
    for (int r = 0; r < rows; ++r) {
        for (int mask = 0; mask < full; ++mask) {
            if (dp[r][mask] == kNegInf) continue;
            dp[r + 1][mask] = std::max(dp[r + 1][mask], dp[r][mask]);  // row unassigned
            for (int c = 0; c < cols; ++c) {
                if (mask & (1 << c)) continue;
                auto v = at(r, c);
                if (!v) continue;
                int& slot = dp[r + 1][mask | (1 << c)];
                slot = std::max(slot, dp[r][mask] + *v);
            }
        }
    }
    int best_mask = 0;
    for (int mask = 0; mask < full; ++mask)
        if (dp[rows][mask] > dp[rows][best_mask]) best_mask = mask;

    AssignmentResult result;
    result.total = dp[rows][best_mask];
    int mask = best_mask;
    for (int r = rows; r > 0; --r) {
        if (dp[r][mask] == dp[r - 1][mask]) continue;
        for (int c = 0; c < cols; ++c) {
            if (!(mask & (1 << c)) || !at(r - 1, c)) continue;
            if (dp[r][mask] == dp[r - 1][mask ^ (1 << c)] + *at(r - 1, c)) {
                const int agent = transpose ? c : r - 1;
                const int goal = transpose ? r - 1 : c;
                result.agent_goal[agent] = goal;
                mask ^= 1 << c;
                break;
            }
        }
    }
    return result;
}

// --- matrix text format --------------------------------------------------------
// First line "A G"; then A lines of G entries, integers or "x" (ineligible).

inline UtilityMatrix parse_utility_matrix(std::istream& in) {
    int agents = 0, goals = 0;
    if (!(in >> agents >> goals) || agents < 0 || goals < 0)
        throw std::invalid_argument("matrix header must be two non-negative integers");
    UtilityMatrix m = UtilityMatrix::make(agents, goals);
    for (int a = 0; a < agents; ++a) {
        for (int g = 0; g < goals; ++g) {
            std::string token;
            if (!(in >> token)) throw std::invalid_argument("matrix truncated");
            if (token == "x" || token == "X") continue;
            try {
                std::size_t pos = 0;
                const int v = std::stoi(token, &pos);
                if (pos != token.size()) throw std::invalid_argument(token);
                m.u[a][g] = v;
            } catch (const std::exception&) {
                throw std::invalid_argument("bad matrix entry: " + token);
            }
        }
    }
    return m;
}

}  // namespace marsim
