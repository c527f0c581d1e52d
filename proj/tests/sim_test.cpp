#include "marsim/sim.hpp"

#include <gtest/gtest.h>

#include "marsim/matchlog.hpp"
#include "test_support.hpp"

namespace marsim {
namespace {

World two_agent_world() {
    // path 0-1-2 with weights 2,5; values 3,7,2
    World w;
    w.graph = make_world_graph({3, 7, 2}, {{0, 1, 2}, {1, 2, 5}});
    w.agents[0] = testing::make_agent(0, Team::A, 0);
    w.agents[1] = testing::make_agent(1, Team::B, 2);
    for (auto& [id, a] : w.agents) {
        a.energy = 10;
        a.max_energy = 30;
        a.max_health = 10;
    }
    return w;
}

const CostModel kModel{10, 30, 5};

TEST(ResolveStep, AllSkipLeavesWorldButScores) {
    World w = two_agent_world();
    const auto before = w.agents;
    const auto record =
        resolve_step(w, {{0, Action::skip()}, {1, Action::skip()}}, kModel);
    EXPECT_EQ(w.agents.at(0).position, before.at(0).position);
    EXPECT_EQ(w.agents.at(0).energy, before.at(0).energy);
    EXPECT_EQ(w.step, 1);
    EXPECT_EQ(record.step, 0);
    EXPECT_EQ(record.step_score_a, 3);
    EXPECT_EQ(record.step_score_b, 2);  // each holds its own vertex; v1 ties
}

TEST(ResolveStep, RechargeClampsAtMax) {
    World w = two_agent_world();
    w.agents.at(0).energy = 25;
    resolve_step(w, {{0, Action::recharge()}, {1, Action::skip()}}, kModel);
    EXPECT_EQ(w.agents.at(0).energy, 30);
}

TEST(ResolveStep, DisabledRechargeIsHalved) {
    World w = two_agent_world();
    w.agents.at(0).health = 0;
    w.agents.at(0).energy = 3;
    resolve_step(w, {{0, Action::recharge()}, {1, Action::skip()}}, kModel);
    EXPECT_EQ(w.agents.at(0).energy, 8);  // floor(10/2)
}

TEST(ResolveStep, GotoWithInsufficientEnergyFailsAndReveals) {
    World w = two_agent_world();
    w.agents.at(1).energy = 3;  // edge 1-2 costs 5... agent 1 is at 2
    const auto record =
        resolve_step(w, {{0, Action::skip()}, {1, Action::goto_vertex(1)}}, kModel);
    const auto& oc = record.actions[1];
    EXPECT_EQ(oc.agent, 1);
    EXPECT_FALSE(oc.success);
    EXPECT_EQ(w.agents.at(1).position, 2);
    EXPECT_EQ(w.agents.at(1).energy, 3);
    ASSERT_TRUE(w.last_effects.failed_move.count(1));
    EXPECT_EQ(w.last_effects.failed_move.at(1).weight, 5);
}

TEST(ResolveStep, GotoDeductsWeightAndMoves) {
    World w = two_agent_world();
    resolve_step(w, {{0, Action::goto_vertex(1)}, {1, Action::skip()}}, kModel);
    EXPECT_EQ(w.agents.at(0).position, 1);
    EXPECT_EQ(w.agents.at(0).energy, 8);
}

TEST(ResolveStep, GotoOverNonEdgeFails) {
    World w = two_agent_world();
    const auto record =
        resolve_step(w, {{0, Action::goto_vertex(2)}, {1, Action::skip()}}, kModel);
    EXPECT_FALSE(record.actions[0].success);
    EXPECT_EQ(w.agents.at(0).position, 0);
}

TEST(ResolveStep, ProbeAndSurveyProduceEffects) {
    World w = two_agent_world();
    resolve_step(w, {{0, Action::probe()}, {1, Action::survey()}}, kModel);
    ASSERT_TRUE(w.last_effects.probed.count(0));
    EXPECT_EQ(w.last_effects.probed.at(0).vertex, 0);
    EXPECT_EQ(w.last_effects.probed.at(0).value, 3);
    ASSERT_TRUE(w.last_effects.surveyed.count(1));
    ASSERT_EQ(w.last_effects.surveyed.at(1).size(), 1u);
    EXPECT_EQ(w.last_effects.surveyed.at(1)[0].weight, 5);
    EXPECT_EQ(w.agents.at(0).energy, 9);
}

TEST(ResolveStep, DisabledAgentsCannotProbeSurveyRepair) {
    World w = two_agent_world();
    w.agents.at(0).health = 0;
    const auto record =
        resolve_step(w, {{0, Action::probe()}, {1, Action::skip()}}, kModel);
    EXPECT_FALSE(record.actions[0].success);
    EXPECT_TRUE(w.last_effects.probed.empty());
}

TEST(ResolveStep, RepairHealsCoLocatedTarget) {
    World w = two_agent_world();
    w.agents[2] = testing::make_agent(2, Team::A, 0, 0, Role::Repairer);
    w.agents.at(2).energy = 10;
    std::swap(w.agents.at(2).role, w.agents.at(0).role);
    w.agents.at(0).role = Role::Repairer;
    w.agents.at(2).role = Role::Explorer;
    w.agents.at(2).health = 0;  // disabled, same vertex as repairer 0
    const auto record = resolve_step(
        w, {{0, Action::repair(2)}, {1, Action::skip()}, {2, Action::skip()}}, kModel);
    EXPECT_TRUE(record.actions[0].success);
    EXPECT_EQ(w.agents.at(2).health, 10);
    EXPECT_FALSE(w.agents.at(2).disabled());
    EXPECT_EQ(w.agents.at(0).energy, 8);
}

TEST(ResolveStep, RepairFailsForWrongRoleOrDistance) {
    World w = two_agent_world();
    w.agents.at(1).health = 0;
    // agent 0 is an explorer and not co-located
    const auto record =
        resolve_step(w, {{0, Action::repair(1)}, {1, Action::skip()}}, kModel);
    EXPECT_FALSE(record.actions[0].success);
    EXPECT_EQ(w.agents.at(1).health, 0);
}

TEST(ResolveStep, MissingActionIsFlaggedSkip) {
    World w = two_agent_world();
    const auto record = resolve_step(w, {{0, Action::skip()}}, kModel);
    const auto& oc = record.actions[1];
    EXPECT_EQ(oc.agent, 1);
    EXPECT_EQ(oc.action.kind, ActionKind::Skip);
    EXPECT_FALSE(oc.issued);
    EXPECT_FALSE(oc.success);
}

TEST(ResolveStep, ActionFromCrashedAgentRejected) {
    World w = two_agent_world();
    w.crashed.insert(1);
    EXPECT_THROW(resolve_step(w, {{0, Action::skip()}, {1, Action::skip()}}, kModel),
                 std::invalid_argument);
}

TEST(GeneratePercepts, AloneSeesOnlySelf) {
    World w;
    w.graph = make_world_graph({1, 1, 1}, {{0, 1, 1}, {1, 2, 1}});
    w.agents[0] = testing::make_agent(0, Team::A, 0);
    w.agents[1] = testing::make_agent(1, Team::B, 2);
    const auto percepts = generate_percepts(w);
    EXPECT_TRUE(percepts.at(0).sightings.empty());
    ASSERT_EQ(percepts.at(0).incident_edges.size(), 1u);
}

TEST(GeneratePercepts, AdjacentAgentsSeeEachOther) {
    World w;
    w.graph = make_world_graph({1, 1}, {{0, 1, 1}});
    w.agents[0] = testing::make_agent(0, Team::A, 0);
    w.agents[1] = testing::make_agent(1, Team::B, 1, 0);  // disabled
    const auto percepts = generate_percepts(w);
    ASSERT_EQ(percepts.at(0).sightings.size(), 1u);
    EXPECT_EQ(percepts.at(0).sightings[0].agent, 1);
    EXPECT_EQ(percepts.at(0).sightings[0].health, 0);
    ASSERT_EQ(percepts.at(1).sightings.size(), 1u);
    EXPECT_EQ(percepts.at(1).sightings[0].agent, 0);
    EXPECT_EQ(percepts.at(1).sightings[0].health, 10);
}

TEST(GeneratePercepts, ProbeResultVisibleToActorOnly) {
    World w = two_agent_world();
    resolve_step(w, {{0, Action::probe()}, {1, Action::skip()}}, kModel);
    const auto percepts = generate_percepts(w);
    ASSERT_TRUE(percepts.at(0).probed.has_value());
    EXPECT_EQ(percepts.at(0).probed->value, 3);
    EXPECT_FALSE(percepts.at(1).probed.has_value());
}

TEST(InjectFault, DisableCrashAndDropRate) {
    World w = two_agent_world();
    MessageHarness h({{0, Team::A}, {1, Team::B}}, ChannelConfig{0.5, {}, 3, {}});
    inject_fault(w, h, FaultDisable{0});
    EXPECT_TRUE(w.agents.at(0).disabled());
    inject_fault(w, h, FaultCrash{1});
    EXPECT_TRUE(w.crashed.count(1));
    EXPECT_TRUE(h.crashed_at(1, 99));
    inject_fault(w, h, FaultCrash{1});  // ignored
    EXPECT_EQ(w.crashed.size(), 1u);
    inject_fault(w, h, FaultDropRate{0.0});
    EXPECT_EQ(h.config().drop_probability, 0.0);
}

TEST(InjectFault, CrashedAgentCannotBeRepaired) {
    World w = two_agent_world();
    w.agents.at(0).role = Role::Repairer;
    w.agents.at(1).position = 0;
    w.agents.at(1).health = 0;
    MessageHarness h({{0, Team::A}, {1, Team::B}}, ChannelConfig{0, {}, 3, {}});
    inject_fault(w, h, FaultCrash{1});
    const auto record = resolve_step(w, {{0, Action::repair(1)}}, kModel);
    EXPECT_FALSE(record.actions[0].success);
}

MatchConfig small_config() {
    MatchConfig c;
    c.seed = 42;
    c.steps = 15;
    c.vertices = 12;
    c.extra_edges = 6;
    c.team_size = 3;
    c.max_energy = 20;
    c.recharge_rate = 6;
    c.occupy_goals = 3;
    return c;
}

TEST(RunMatch, ZeroStepsIsEmptyDraw) {
    MatchConfig c = small_config();
    c.steps = 0;
    const auto log = run_match(c);
    EXPECT_TRUE(log.records.empty());
    EXPECT_EQ(log.summary.score_a, 0);
    EXPECT_EQ(log.summary.score_b, 0);
    EXPECT_EQ(log.summary.winner, "draw");
}

TEST(RunMatch, InvalidConfigRejectedBeforeStepping) {
    MatchConfig c = small_config();
    c.recharge_rate = 0;
    EXPECT_THROW(run_match(c), ConfigError);
    MatchConfig f = small_config();
    f.fault_schedule.push_back({99, FaultDisable{0}});
    EXPECT_THROW(run_match(f), ConfigError);
}

TEST(RunMatch, SameSeedSameBytes) {
    const auto a = match_log_to_jsonl(run_match(small_config()));
    const auto b = match_log_to_jsonl(run_match(small_config()));
    EXPECT_EQ(a, b);
    MatchConfig other = small_config();
    other.seed = 43;
    EXPECT_NE(match_log_to_jsonl(run_match(other)), a);
}

TEST(RunMatch, MirroredStartPositionsMirrorScores) {
    MatchConfig c = small_config();
    c.steps = 12;
    c.start_positions_a = {0, 3, 7};
    c.start_positions_b = {1, 5, 9};
    const auto log = run_match(c);

    MatchConfig m = c;
    std::swap(m.start_positions_a, m.start_positions_b);
    const auto mirrored = run_match(m);

    EXPECT_EQ(log.summary.score_a, mirrored.summary.score_b);
    EXPECT_EQ(log.summary.score_b, mirrored.summary.score_a);
    ASSERT_EQ(log.records.size(), mirrored.records.size());
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        EXPECT_EQ(log.records[i].step_score_a, mirrored.records[i].step_score_b);
        EXPECT_EQ(log.records[i].step_score_b, mirrored.records[i].step_score_a);
    }
}

TEST(RunMatch, EnergyAlwaysWithinBounds) {
    MatchConfig c = small_config();
    c.steps = 25;
    const auto log = run_match(c);
    for (const auto& r : log.records)
        for (const auto& a : r.agents) {
            ASSERT_GE(a.energy, 0);
            ASSERT_LE(a.energy, c.max_energy);
        }
}

TEST(RunMatch, StepScoresRecomputableFromRecordedPositions) {
    MatchConfig c = small_config();
    c.steps = 20;
    const auto log = run_match(c);

    // regenerate the identical terrain from the seed
    std::mt19937_64 rng(mix64(c.seed));
    const auto graph = generate_world(rng, c.vertices, c.extra_edges);

    for (const auto& r : log.records) {
        std::vector<AgentState> agents;
        for (const auto& snap : r.agents) {
            if (snap.crashed) continue;
            AgentState a;
            a.id = snap.id;
            a.team = snap.id < c.team_size ? Team::A : Team::B;
            a.position = snap.position;
            a.health = snap.health;
            a.max_health = kMaxHealth;
            agents.push_back(a);
        }
        const auto coloring = color_zones(graph, agents);
        ASSERT_EQ(coloring.score_a, r.step_score_a) << "step " << r.step;
        ASSERT_EQ(coloring.score_b, r.step_score_b) << "step " << r.step;
    }
}

TEST(RunMatch, CrashFaultSilencesAgentForRestOfMatch) {
    MatchConfig c = small_config();
    c.steps = 10;
    c.fault_schedule.push_back({3, FaultCrash{1}});
    const auto log = run_match(c);
    for (const auto& r : log.records) {
        for (const auto& oc : r.actions) {
            if (r.step >= 3) {
                ASSERT_NE(oc.agent, 1) << "crashed agent still acting";
            }
        }
        for (const auto& snap : r.agents) {
            if (snap.id == 1 && r.step >= 3) {
                ASSERT_TRUE(snap.crashed);
            }
        }
    }
}

TEST(MatchLogFormat, RoundTripsThroughJsonl) {
    MatchConfig c = small_config();
    c.steps = 6;
    c.fault_schedule.push_back({2, FaultDisable{2}});
    const auto log = run_match(c);
    const auto text = match_log_to_jsonl(log);
    std::istringstream in(text);
    const auto parsed = match_log_from_jsonl(in);
    EXPECT_EQ(match_log_to_jsonl(parsed), text);  // stable round trip
    EXPECT_EQ(parsed.summary.score_a, log.summary.score_a);
    EXPECT_EQ(parsed.records.size(), log.records.size());
}

}  // namespace
}  // namespace marsim
