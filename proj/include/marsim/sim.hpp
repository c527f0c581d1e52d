#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "marsim/agents.hpp"
#include "marsim/auction.hpp"
#include "marsim/beliefs.hpp"
#include "marsim/core.hpp"
#include "marsim/netsim.hpp"
#include "marsim/pathfind.hpp"
#include "marsim/world.hpp"

namespace marsim {

inline constexpr int kMaxHealth = 10;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FaultDisable {
    AgentId agent = 0;
};
struct FaultCrash {
    AgentId agent = 0;
};
struct FaultDropRate {
    double rate = 0.0;
};
using Fault = std::variant<FaultDisable, FaultCrash, FaultDropRate>;

struct ScheduledFault {
    int step = 0;
    Fault fault;
};

struct MatchConfig {
    std::uint64_t seed = 1;
    int steps = 100;
    int vertices = 20;
    int extra_edges = 10;
    int team_size = 4;
    int max_energy = 30;
    int recharge_rate = 10;
    int unknown_edge_weight = 5;
    int occupy_goals = 4;
    int t_round = 2;
    int award_retries = 2;
    int max_rounds = 0;  // 0 -> team_size + 2
    double drop_probability = 0.0;
    std::vector<ScheduledFault> fault_schedule;
    std::vector<VertexId> start_positions_a;  // optional explicit placement
    std::vector<VertexId> start_positions_b;

    int effective_max_rounds() const { return max_rounds > 0 ? max_rounds : team_size + 2; }

    CostModel cost_model() const {
        return CostModel{recharge_rate, max_energy, unknown_edge_weight};
    }

    void validate() const {
        if (steps < 0) throw ConfigError("steps must be >= 0");
        if (vertices < 1) throw ConfigError("vertices must be >= 1");
        if (extra_edges < 0) throw ConfigError("extra_edges must be >= 0");
        if (team_size < 1) throw ConfigError("team_size must be >= 1");
        if (max_energy < 1) throw ConfigError("max_energy must be >= 1");
        if (recharge_rate < 1) throw ConfigError("recharge_rate must be >= 1");
        if (recharge_rate > max_energy) throw ConfigError("recharge_rate must be <= max_energy");
        if (unknown_edge_weight < 1 || unknown_edge_weight > 9)
            throw ConfigError("unknown_edge_weight must be in [1, 9]");
        if (occupy_goals < 0) throw ConfigError("occupy_goals must be >= 0");
        if (t_round < 1) throw ConfigError("t_round must be >= 1");
        if (award_retries < 1) throw ConfigError("award_retries must be >= 1");
        if (max_rounds < 0) throw ConfigError("max_rounds must be >= 0");
        if (drop_probability < 0.0 || drop_probability > 1.0)
            throw ConfigError("drop_probability must be in [0, 1]");
        for (const auto& f : fault_schedule) {
            if (f.step < 0 || f.step > steps)
                throw ConfigError("fault step outside [0, steps]");
            if (const auto* d = std::get_if<FaultDropRate>(&f.fault)) {
                if (d->rate < 0.0 || d->rate > 1.0)
                    throw ConfigError("fault drop rate must be in [0, 1]");
            }
        }
        auto check_positions = [&](const std::vector<VertexId>& pos, const char* name) {
            if (pos.empty()) return;
            if (static_cast<int>(pos.size()) != team_size)
                throw ConfigError(std::string(name) + " must list team_size vertices");
            for (VertexId v : pos)
                if (v < 0 || v >= vertices)
                    throw ConfigError(std::string(name) + " entry out of range");
        };
        check_positions(start_positions_a, "start_positions_a");
        check_positions(start_positions_b, "start_positions_b");
        if (start_positions_a.empty() != start_positions_b.empty())
            throw ConfigError("explicit start positions must be given for both teams");
    }
};

// Per-agent environment effects of the latest resolved step; feeds percepts.
struct StepEffects {
    std::map<AgentId, VertexValueFact> probed;
    std::map<AgentId, std::vector<EdgeWeightFact>> surveyed;
    std::map<AgentId, EdgeWeightFact> failed_move;
};

struct World {
    WorldGraph graph;
    std::map<AgentId, AgentState> agents;
    std::set<AgentId> crashed;
    int step = 0;
    int cum_score_a = 0;
    int cum_score_b = 0;
    StepEffects last_effects;

    std::vector<AgentState> live_agents() const {
        std::vector<AgentState> out;
        for (const auto& [id, a] : agents)
            if (!crashed.count(id)) out.push_back(a);
        return out;
    }
};

struct ActionOutcome {
    AgentId agent = 0;
    Action action;
    bool success = true;
    bool issued = true;  // false when the engine substituted a Skip
};

struct RendezvousRecord {
    AgentId repairer = 0;
    AgentId patient = 0;
    VertexId meet = 0;
    int steps_repairer = 0;
    int steps_disabled = 0;
};

struct AgentSnapshot {
    AgentId id = 0;
    VertexId position = 0;
    int energy = 0;
    int health = 0;
    bool crashed = false;
    std::optional<GoalId> assigned;
};

struct StepRecord {
    int step = 0;
    std::vector<ActionOutcome> actions;
    std::vector<AgentSnapshot> agents;
    std::vector<RendezvousRecord> rendezvous;
    int colored_a = 0;
    int colored_b = 0;
    int step_score_a = 0;
    int step_score_b = 0;
    int cum_score_a = 0;
    int cum_score_b = 0;
};

// Simultaneous resolution in a fixed phase order: recharges, then moves,
// then the rest; agents in id order within a phase.
inline StepRecord resolve_step(World& world, const std::map<AgentId, Action>& actions,
                               const CostModel& model) {
    for (const auto& [id, action] : actions) {
        (void)action;
        if (!world.agents.count(id)) throw std::invalid_argument("action from unknown agent");
        if (world.crashed.count(id)) throw std::invalid_argument("action from crashed agent");
    }

    StepRecord record;
    record.step = world.step;
    world.last_effects = StepEffects{};

    std::map<AgentId, ActionOutcome> outcomes;
    for (auto& [id, agent] : world.agents) {
        if (world.crashed.count(id)) continue;
        auto it = actions.find(id);
        if (it == actions.end()) {
            outcomes[id] = ActionOutcome{id, Action::skip(), false, false};
        } else {
            outcomes[id] = ActionOutcome{id, it->second, true, true};
        }
    }

    // phase 1: recharge
    for (auto& [id, oc] : outcomes) {
        if (oc.action.kind != ActionKind::Recharge) continue;
        AgentState& a = world.agents.at(id);
        const int rate = a.disabled() ? model.recharge_rate / 2 : model.recharge_rate;
        a.energy = std::min(a.energy + rate, a.max_energy);
    }

    // phase 2: moves
    for (auto& [id, oc] : outcomes) {
        if (oc.action.kind != ActionKind::Goto) continue;
        AgentState& a = world.agents.at(id);
        const auto w = world.graph.valid_vertex(oc.action.to)
                           ? world.graph.edge_weight(a.position, oc.action.to)
                           : std::nullopt;
        if (!w) {
            oc.success = false;
            continue;
        }
        if (a.energy < *w) {
            oc.success = false;
            // bumping into an underestimated edge reveals its true weight
            world.last_effects.failed_move[id] =
                EdgeWeightFact{EdgeKey{a.position, oc.action.to}, *w, world.step + 1};
            continue;
        }
        a.energy -= *w;
        a.position = oc.action.to;
    }

    // phase 3: probe / survey / repair / skip
    for (auto& [id, oc] : outcomes) {
        AgentState& a = world.agents.at(id);
        switch (oc.action.kind) {
            case ActionKind::Probe: {
                if (a.disabled() || a.energy < 1) {
                    oc.success = false;
                    break;
                }
                a.energy -= 1;
                world.last_effects.probed[id] =
                    VertexValueFact{a.position, world.graph.values[a.position], world.step + 1};
                break;
            }
            case ActionKind::Survey: {
                if (a.disabled() || a.energy < 1) {
                    oc.success = false;
                    break;
                }
                a.energy -= 1;
                auto& results = world.last_effects.surveyed[id];
                for (const auto& [u, w] : world.graph.adj[a.position])
                    results.push_back(EdgeWeightFact{EdgeKey{a.position, u}, w, world.step + 1});
                break;
            }
            case ActionKind::Repair: {
                const AgentId target = oc.action.target;
                auto t = world.agents.find(target);
                const bool target_present =
                    t != world.agents.end() && !world.crashed.count(target) && target != id;
                if (a.disabled() || a.role != Role::Repairer || a.energy < 2 ||
                    !target_present || t->second.position != a.position) {
                    oc.success = false;
                    break;
                }
                a.energy -= 2;
                t->second.health = t->second.max_health;
                break;
            }
            default:
                break;
        }
    }

    const auto live = world.live_agents();
    const Coloring coloring = color_zones(world.graph, live);
    world.cum_score_a += coloring.score_a;
    world.cum_score_b += coloring.score_b;
    world.step += 1;

    for (auto& [id, oc] : outcomes) record.actions.push_back(oc);
    for (const auto& [id, a] : world.agents) {
        record.agents.push_back(AgentSnapshot{id, a.position, a.energy, a.health,
                                              world.crashed.count(id) > 0, std::nullopt});
    }
    for (const auto& [v, t] : coloring.color_of) {
        (void)v;
        (t == Team::A ? record.colored_a : record.colored_b)++;
    }
    record.step_score_a = coloring.score_a;
    record.step_score_b = coloring.score_b;
    record.cum_score_a = world.cum_score_a;
    record.cum_score_b = world.cum_score_b;
    return record;
}

// Radius-1 percepts: own state, co-located and adjacent live agents,
// incident edge existence, plus this agent's own action results.
inline std::map<AgentId, Percept> generate_percepts(const World& world) {
    std::map<AgentId, Percept> out;
    for (const auto& [id, a] : world.agents) {
        if (world.crashed.count(id)) continue;
        Percept p;
        p.agent = id;
        p.step = world.step;
        p.self = a;
        for (const auto& [oid, other] : world.agents) {
            if (oid == id || world.crashed.count(oid)) continue;
            const bool visible = other.position == a.position ||
                                 world.graph.edge_weight(a.position, other.position).has_value();
            if (visible)
                p.sightings.push_back(AgentSighting{oid, other.position, other.health,
                                                    other.energy, world.step, id});
        }
        for (const auto& [u, w] : world.graph.adj[a.position]) {
            (void)w;
            p.incident_edges.push_back(EdgeKey{a.position, u});
        }
        auto probed = world.last_effects.probed.find(id);
        if (probed != world.last_effects.probed.end()) p.probed = probed->second;
        auto surveyed = world.last_effects.surveyed.find(id);
        if (surveyed != world.last_effects.surveyed.end()) p.surveyed = surveyed->second;
        auto failed = world.last_effects.failed_move.find(id);
        if (failed != world.last_effects.failed_move.end()) p.failed_move = failed->second;
        p.team_score = a.team == Team::A ? world.cum_score_a : world.cum_score_b;
        out[id] = std::move(p);
    }
    return out;
}

// Applies one scheduled fault at a step boundary. Crashing an already
// crashed agent is ignored.
inline void inject_fault(World& world, MessageHarness& harness, const Fault& fault) {
    if (const auto* d = std::get_if<FaultDisable>(&fault)) {
        auto it = world.agents.find(d->agent);
        if (it == world.agents.end() || world.crashed.count(d->agent)) return;
        it->second.health = 0;
        return;
    }
    if (const auto* c = std::get_if<FaultCrash>(&fault)) {
        if (!world.agents.count(c->agent) || world.crashed.count(c->agent)) return;
        world.crashed.insert(c->agent);
        ChannelConfig cfg = harness.config();
        cfg.crashed_from[c->agent] = harness.current_tick();
        harness.configure_faults(cfg);
        return;
    }
    if (const auto* r = std::get_if<FaultDropRate>(&fault)) {
        ChannelConfig cfg = harness.config();
        cfg.drop_probability = r->rate;
        harness.configure_faults(cfg);
    }
}

struct MatchSummary {
    int steps = 0;
    int score_a = 0;
    int score_b = 0;
    std::string winner;  // "A", "B" or "draw"
};

struct MatchLog {
    std::uint64_t seed = 0;
    int vertices = 0;
    int team_size = 0;
    std::vector<StepRecord> records;
    MatchSummary summary;
};

inline std::vector<RosterEntry> build_roster(const MatchConfig& config) {
    std::vector<RosterEntry> roster;
    const Role pattern[4] = {Role::Repairer, Role::Explorer, Role::Sentinel, Role::Explorer};
    for (int i = 0; i < 2 * config.team_size; ++i) {
        const Team team = i < config.team_size ? Team::A : Team::B;
        const int idx = i % config.team_size;
        roster.push_back(RosterEntry{i, team, pattern[idx % 4]});
    }
    return roster;
}

// The per-step loop: faults, deliver, merge, auction, decide, resolve,
// percepts, share. Identical configs produce identical logs. When
// `net_events` is given, every send/drop/deliver event is captured there.
inline MatchLog run_match(const MatchConfig& config, std::vector<NetEvent>* net_events = nullptr) {
    config.validate();
    std::mt19937_64 rng(mix64(config.seed));
    World world;
    world.graph = generate_world(rng, config.vertices, config.extra_edges);

    const auto roster = build_roster(config);
    auto draw_vertex = [&rng, &config]() {
        return static_cast<VertexId>(rng() % static_cast<std::uint64_t>(config.vertices));
    };
    for (const auto& entry : roster) {
        AgentState a;
        a.id = entry.id;
        a.team = entry.team;
        a.role = entry.role;
        if (!config.start_positions_a.empty()) {
            const auto& pool =
                entry.team == Team::A ? config.start_positions_a : config.start_positions_b;
            a.position = pool[entry.id % config.team_size];
        } else {
            a.position = draw_vertex();
        }
        a.energy = config.max_energy;
        a.max_energy = config.max_energy;
        a.health = kMaxHealth;
        a.max_health = kMaxHealth;
        world.agents[a.id] = a;
    }

    std::vector<std::pair<AgentId, Team>> net_roster;
    for (const auto& entry : roster) net_roster.emplace_back(entry.id, entry.team);
    MessageHarness harness(net_roster,
                           ChannelConfig{config.drop_probability, {}, mix64(config.seed, 0x6e65747369ULL), {}});
    if (net_events) harness.enable_log(true);

    const CostModel model = config.cost_model();
    const AuctionConstants consts{config.t_round, config.award_retries,
                                  config.effective_max_rounds()};
    std::map<AgentId, AgentController> controllers;
    for (const auto& entry : roster) {
        std::vector<RosterEntry> team;
        for (const auto& e : roster)
            if (e.team == entry.team) team.push_back(e);
        controllers.emplace(entry.id, AgentController(entry, team, config.vertices, model,
                                                      config.occupy_goals, consts));
    }

    MatchLog log;
    log.seed = config.seed;
    log.vertices = config.vertices;
    log.team_size = config.team_size;

    auto send_all = [&harness](AgentId src, const std::vector<OutgoingMessage>& out) {
        for (const auto& m : out) harness.send(src, m.dst, m.payload);
    };
    auto share_percepts = [&]() {
        const auto percepts = generate_percepts(world);
        for (const auto& [id, percept] : percepts) {
            auto fresh = controllers.at(id).ingest_percept(percept);
            if (!fresh.empty()) harness.send(id, std::nullopt, PerceptShareMsg{std::move(fresh)});
        }
    };

    int tick = 0;
    share_percepts();  // step-0 observations seed the belief stores

    const int epoch_budget = (consts.max_rounds + 4) * consts.t_round + 4;
    for (int s = 0; s < config.steps; ++s) {
        ++tick;
        auto delivered = harness.deliver_tick(tick);
        // the delivery tick is the step boundary; faults apply here
        for (const auto& f : config.fault_schedule)
            if (f.step == s) inject_fault(world, harness, f.fault);
        for (auto& [id, envs] : delivered) {
            if (world.crashed.count(id)) continue;
            for (const auto& env : envs) send_all(id, controllers.at(id).on_envelope(env));
        }

        std::map<AgentId, AuctionMachine> machines;
        for (const auto& entry : roster) {
            if (world.crashed.count(entry.id)) continue;
            machines.emplace(entry.id, controllers.at(entry.id).build_auction(s));
        }
        tick = run_epoch(harness, machines, tick, epoch_budget);

        std::vector<RendezvousRecord> announced;
        for (auto& [id, machine] : machines) {
            auto& controller = controllers.at(id);
            controller.conclude_auction(machine);
            const auto msgs = controller.maybe_announce_rendezvous(s);
            send_all(id, msgs);
            if (!msgs.empty()) {
                const auto plan = controller.rendezvous();
                if (plan)
                    announced.push_back(RendezvousRecord{plan->repairer, plan->patient,
                                                         plan->meet_vertex, plan->steps_repairer,
                                                         plan->steps_disabled});
            }
        }

        std::map<AgentId, Action> actions;
        for (const auto& entry : roster) {
            if (world.crashed.count(entry.id)) continue;
            actions[entry.id] = controllers.at(entry.id).decide_action();
        }

        StepRecord record = resolve_step(world, actions, model);
        record.rendezvous = std::move(announced);
        for (auto& snap : record.agents) {
            if (world.crashed.count(snap.id)) continue;
            snap.assigned = controllers.at(snap.id).assigned_goal();
        }
        log.records.push_back(std::move(record));

        share_percepts();
    }

    log.summary.steps = config.steps;
    log.summary.score_a = world.cum_score_a;
    log.summary.score_b = world.cum_score_b;
    log.summary.winner = world.cum_score_a > world.cum_score_b   ? "A"
                         : world.cum_score_b > world.cum_score_a ? "B"
                                                                 : "draw";
    if (net_events) *net_events = harness.log();
    return log;
}

}  // namespace marsim
