#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "marsim/auction.hpp"
#include "marsim/beliefs.hpp"
#include "marsim/core.hpp"
#include "marsim/goals.hpp"
#include "marsim/messages.hpp"
#include "marsim/netsim.hpp"
#include "marsim/pathfind.hpp"

namespace marsim {

// Repairer-announced meeting arrangement for one disabled teammate.
struct RendezvousPlan {
    AgentId repairer = 0;
    AgentId patient = 0;
    VertexId meet_vertex = 0;
    AgentId last_mover = 0;
    int step_announced = 0;
    int steps_repairer = 0;
    int steps_disabled = 0;
};

enum class ActionKind : std::uint8_t { Goto, Probe, Survey, Recharge, Repair, Skip };

struct Action {
    ActionKind kind = ActionKind::Skip;
    VertexId to = -1;       // Goto destination
    AgentId target = -1;    // Repair target

    static Action goto_vertex(VertexId v) { return {ActionKind::Goto, v, -1}; }
    static Action probe() { return {ActionKind::Probe, -1, -1}; }
    static Action survey() { return {ActionKind::Survey, -1, -1}; }
    static Action recharge() { return {ActionKind::Recharge, -1, -1}; }
    static Action repair(AgentId a) { return {ActionKind::Repair, -1, a}; }
    static Action skip() { return {ActionKind::Skip, -1, -1}; }
};

inline const char* action_kind_name(ActionKind k) {
    switch (k) {
        case ActionKind::Goto: return "goto";
        case ActionKind::Probe: return "probe";
        case ActionKind::Survey: return "survey";
        case ActionKind::Recharge: return "recharge";
        case ActionKind::Repair: return "repair";
        default: return "skip";
    }
}

struct RosterEntry {
    AgentId id = 0;
    Team team = Team::A;
    Role role = Role::Explorer;
};

// One agent's controller: isolated belief store, per-step auction machine,
// rendezvous bookkeeping and the action ladder. All coordination flows
// through envelopes.
class AgentController {
public:
    AgentController(RosterEntry self, std::vector<RosterEntry> team_roster, int vertex_count,
                    CostModel model, int occupy_goals, AuctionConstants auction_consts)
        : self_(self),
          roster_(std::move(team_roster)),
          model_(model),
          occupy_goals_(occupy_goals),
          auction_consts_(auction_consts),
          beliefs_(self.id, vertex_count) {}

    AgentId id() const { return self_.id; }
    Team team() const { return self_.team; }
    Role role() const { return self_.role; }
    const BeliefStore& beliefs() const { return beliefs_; }
    BeliefStore& mutable_beliefs() { return beliefs_; }
    std::optional<GoalId> assigned_goal() const { return assigned_; }
    const AssignmentLedger& ledger() const { return ledger_; }
    std::optional<RendezvousPlan> rendezvous() const { return rendezvous_; }

    // Percept ingestion; returns the facts to broadcast (new ones only).
    std::vector<NewFact> ingest_percept(const Percept& percept) {
        auto fresh = beliefs_.on_percept(percept);
        if (!beliefs_.self().disabled() && rendezvous_ &&
            rendezvous_->patient == self_.id) {
            rendezvous_.reset();  // repaired: stop following the meet plan
        }
        advance_stored_plan(percept);
        return fresh;
    }

    // Non-auction envelope handling; may emit replies (Ack).
    std::vector<OutgoingMessage> on_envelope(const Envelope& env) {
        std::vector<OutgoingMessage> out;
        if (const auto* share = std::get_if<PerceptShareMsg>(&env.payload)) {
            merge_beliefs(beliefs_, share->facts);
            return out;
        }
        if (const auto* rv = std::get_if<RendezvousMsg>(&env.payload)) {
            if (rv->patient == self_.id) {
                if (!rendezvous_ || rv->step_announced >= rendezvous_->step_announced) {
                    rendezvous_ = RendezvousPlan{rv->repairer, rv->patient, rv->meet,
                                                 rv->last_mover, rv->step_announced, 0, 0};
                    out.push_back(OutgoingMessage{env.src, AckMsg{env.seq}});
                }
            }
            return out;
        }
        return out;  // acks and stray auction traffic need no reply
    }

    // Believed current state of a teammate, if ever sighted.
    std::optional<AgentState> believed_teammate(const RosterEntry& entry) const {
        auto s = beliefs_.sighting_of(entry.id);
        if (!s) return std::nullopt;
        AgentState st;
        st.id = entry.id;
        st.team = entry.team;
        st.role = entry.role;
        st.position = s->vertex;
        st.health = s->health;
        st.energy = s->energy;
        st.max_energy = model_.max_energy;
        return st;
    }

    std::vector<AgentState> believed_team() const {
        std::vector<AgentState> team;
        for (const auto& entry : roster_) {
            if (entry.id == self_.id) continue;
            if (auto st = believed_teammate(entry)) team.push_back(*st);
        }
        return team;
    }

    // Goal list and per-goal utilities for this step's auction epoch.
    AuctionMachine build_auction(int epoch) {
        goals_ = generate_goals(beliefs_, believed_team(), occupy_goals_);
        const auto& ctx = context();
        std::map<GoalId, int> table;
        if (ctx.search) {
            const auto utilities =
                compute_utilities(beliefs_.self(), goals_, beliefs_, model_, ctx.adj, *ctx.search);
            auto hint = table.end();
            for (std::size_t i = 0; i < goals_.size(); ++i)
                if (utilities[i]) hint = table.emplace_hint(hint, goals_[i].id, *utilities[i]);
        }
        std::vector<AgentId> teammates;
        for (const auto& entry : roster_)
            if (entry.id != self_.id) teammates.push_back(entry.id);
        return AuctionMachine(self_.id, epoch, std::move(teammates), std::move(table),
                              auction_consts_);
    }

    void conclude_auction(const AuctionMachine& machine) {
        ledger_ = machine.ledger();
        assigned_ = machine.my_goal();
    }

    // Repairer side of the rendezvous: (re)announce when newly assigned or
    // when the believed patient position moved. Returns the broadcast.
    std::vector<OutgoingMessage> maybe_announce_rendezvous(int step) {
        std::vector<OutgoingMessage> out;
        if (!assigned_ || assigned_->kind != GoalKind::Repair) return out;
        const AgentId patient = assigned_->target;
        auto sighting = beliefs_.sighting_of(patient);
        if (!sighting) return out;
        if (rendezvous_ && rendezvous_->patient == patient &&
            last_announced_pos_ == sighting->vertex)
            return out;
        const auto& ctx = context();
        if (!ctx.search) return out;
        auto meet = meeting_point(ctx.adj, *ctx.search, sighting->vertex, sighting->energy,
                                  model_);
        if (!meet) {
            rendezvous_.reset();
            return out;  // patient unreachable: goal abandoned
        }
        const AgentId last =
            meet->last_mover == LastMover::Repairer ? self_.id : patient;
        rendezvous_ = RendezvousPlan{self_.id,  patient, meet->meet, last, step,
                                     meet->steps_repairer, meet->steps_disabled};
        last_announced_pos_ = sighting->vertex;
        out.push_back(OutgoingMessage{
            std::nullopt, RendezvousMsg{self_.id, patient, meet->meet, last, step}});
        return out;
    }

    // Deterministic priority ladder; total (always returns an action).
    Action decide_action() const {
        const AgentState& self = beliefs_.self();
        const auto& ctx = context();
        return energy_gate(pick_action(self, ctx), self, ctx.adj);
    }

private:
    // per-step planning state derived from the belief store
    struct PlanContext {
        Adjacency adj;
        std::unique_ptr<PathSearch> search;  // from own position and energy
    };

    const PlanContext& context() const {
        const auto& self = beliefs_.self();
        const bool adj_stale = ctx_graph_revision_ != beliefs_.graph_revision();
        if (adj_stale) {
            ctx_.search.reset();  // holds a reference into ctx_.adj
            ctx_.adj = beliefs_.believed_graph(model_);
            ctx_graph_revision_ = beliefs_.graph_revision();
        }
        if (adj_stale || !ctx_.search || search_pos_ != self.position ||
            search_energy_ != self.energy) {
            ctx_.search.reset();
            if (self.position >= 0 && self.position < static_cast<VertexId>(ctx_.adj.size()))
                ctx_.search =
                    std::make_unique<PathSearch>(ctx_.adj, self.position, self.energy, model_);
            search_pos_ = self.position;
            search_energy_ = self.energy;
        }
        return ctx_;
    }

    const VertexKnowledge& knowledge() const {
        if (!knowledge_ || knowledge_revision_ != beliefs_.revision()) {
            knowledge_ = std::make_unique<VertexKnowledge>(beliefs_);
            knowledge_revision_ = beliefs_.revision();
        }
        return *knowledge_;
    }

    // plan bookkeeping: the stored plan advances when the percept confirms
    // the expected effect of its front action, and is dropped on divergence
    // or on a failed move (which reveals a better-informed weight)
    void advance_stored_plan(const Percept& percept) {
        if (!plan_) return;
        if (percept.failed_move) {
            plan_.reset();
            return;
        }
        const auto& self = beliefs_.self();
        if (plan_->remaining.empty()) {
            plan_.reset();
            return;
        }
        const auto [post_pos, post_energy] = plan_post_state(plan_->remaining.front());
        if (self.position == post_pos && self.energy == post_energy) {
            plan_->remaining.erase(plan_->remaining.begin());
            plan_->expected_pos = post_pos;
            plan_->expected_energy = post_energy;
            if (plan_->remaining.empty()) plan_.reset();
            return;
        }
        if (self.position != plan_->expected_pos || self.energy != plan_->expected_energy)
            plan_.reset();  // out-of-plan action or interference; re-plan fresh
    }

    std::pair<VertexId, int> plan_post_state(const PlanStep& step) const {
        if (step.recharge)
            return {plan_->expected_pos,
                    std::min(plan_->expected_energy + model_.recharge_rate, model_.max_energy)};
        const auto w = adjacency_weight(context().adj, plan_->expected_pos, step.to);
        return {step.to, plan_->expected_energy - (w ? *w : 0)};
    }

    Action pick_action(const AgentState& self, const PlanContext& ctx) const {
        // (1) disabled: follow the announced meet plan, else recharge
        if (self.disabled()) {
            if (rendezvous_ && rendezvous_->patient == self_.id &&
                self.position != rendezvous_->meet_vertex) {
                auto plan = plan_path(ctx.adj, self.position, self.energy,
                                      rendezvous_->meet_vertex, model_.disabled_variant());
                if (plan && plan->steps() > 0) return plan_action(plan->actions.front());
            }
            return Action::recharge();
        }
        if (!ctx.search) return Action::skip();

        // (3) assigned goal
        if (assigned_) {
            if (auto act = goal_action(self, ctx, *assigned_)) return *act;
        }

        // (4) exploration: nearest positive-score vertex, ties by higher
        // score then lower id
        const VertexKnowledge& known = knowledge();
        const int mult = self_.role == Role::Explorer ? 2 : 1;
        auto score = [&](VertexId v) {
            int s = 0;
            if (known.known[v] && !beliefs_.vertex_value_known(v)) s += kProbeBaseValue;
            if (known.unsurveyed[v]) s += kSurveyBaseValue;
            return mult * s;
        };
        std::optional<VertexId> target;
        int best_steps = 0, best_score = 0;
        for (VertexId v = 0; v < static_cast<VertexId>(ctx.adj.size()); ++v) {
            const int steps = ctx.search->min_steps(v);
            if (steps < 0) continue;
            const int s = score(v);
            if (s <= 0) continue;
            if (!target || steps < best_steps || (steps == best_steps && s > best_score)) {
                target = v;
                best_steps = steps;
                best_score = s;
            }
        }
        if (target) {
            if (*target == self.position) {
                if (!beliefs_.vertex_value_known(*target)) return Action::probe();
                return Action::survey();
            }
            auto plan = ctx.search->extract_plan(*target);
            if (plan && plan->steps() > 0) return plan_action(plan->actions.front());
        }

        // (5)
        return Action::skip();
    }

    std::optional<Action> goal_action(const AgentState& self, const PlanContext& ctx,
                                      const GoalId& goal) const {
        VertexId target = -1;
        if (goal.kind == GoalKind::Repair) {
            if (!rendezvous_ || rendezvous_->patient != goal.target) return std::nullopt;
            target = rendezvous_->meet_vertex;
        } else {
            target = goal.target;
        }
        if (target < 0 || target >= static_cast<VertexId>(ctx.adj.size())) return std::nullopt;

        if (self.position == target) {
            switch (goal.kind) {
                case GoalKind::Probe:
                    return Action::probe();
                case GoalKind::Survey:
                    return Action::survey();
                case GoalKind::Repair: {
                    auto patient = beliefs_.sighting_of(goal.target);
                    if (patient && patient->vertex == self.position)
                        return Action::repair(goal.target);
                    return Action::recharge();  // wait at the meet vertex
                }
                case GoalKind::Occupy:
                    return self.energy < self.max_energy ? Action::recharge() : Action::skip();
            }
        }
        if (plan_ && plan_->goal == goal && plan_->target == target &&
            plan_->expected_pos == self.position && plan_->expected_energy == self.energy &&
            !plan_->remaining.empty()) {
            return plan_action(plan_->remaining.front());
        }
        auto plan = ctx.search->extract_plan(target);
        if (!plan || plan->steps() == 0) {
            plan_.reset();
            return std::nullopt;
        }
        plan_ = StoredPlan{goal, target, plan->actions, self.position, self.energy};
        return plan_action(plan->actions.front());
    }

    static Action plan_action(const PlanStep& step) {
        return step.recharge ? Action::recharge() : Action::goto_vertex(step.to);
    }

    // (2) next intended action costlier than current energy -> recharge
    Action energy_gate(Action a, const AgentState& self, const Adjacency& adj) const {
        int cost = 0;
        switch (a.kind) {
            case ActionKind::Goto: {
                auto w = adjacency_weight(adj, self.position, a.to);
                cost = w ? *w : model_.unknown_edge_weight;
                break;
            }
            case ActionKind::Probe:
            case ActionKind::Survey:
                cost = 1;
                break;
            case ActionKind::Repair:
                cost = 2;
                break;
            default:
                return a;
        }
        return cost > self.energy ? Action::recharge() : a;
    }

    RosterEntry self_;
    std::vector<RosterEntry> roster_;
    CostModel model_;
    int occupy_goals_;
    AuctionConstants auction_consts_;

    struct StoredPlan {
        GoalId goal;
        VertexId target = -1;
        std::vector<PlanStep> remaining;
        VertexId expected_pos = -1;
        int expected_energy = 0;
    };

    BeliefStore beliefs_;
    std::vector<Goal> goals_;
    std::optional<GoalId> assigned_;
    AssignmentLedger ledger_;
    std::optional<RendezvousPlan> rendezvous_;
    VertexId last_announced_pos_ = -1;

    mutable PlanContext ctx_;
    mutable std::uint64_t ctx_graph_revision_ = ~std::uint64_t{0};
    mutable VertexId search_pos_ = -1;
    mutable int search_energy_ = -1;
    mutable std::unique_ptr<VertexKnowledge> knowledge_;
    mutable std::uint64_t knowledge_revision_ = ~std::uint64_t{0};
    mutable std::optional<StoredPlan> plan_;
};

}  // namespace marsim
