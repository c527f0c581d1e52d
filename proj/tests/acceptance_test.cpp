// Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <map>
#include <set>
#include <vector>

#include "marsim/agents.hpp"
#include "marsim/auction.hpp"
#include "marsim/beliefs.hpp"
#include "marsim/matchlog.hpp"
#include "marsim/netsim.hpp"
#include "marsim/pathfind.hpp"
#include "marsim/sim.hpp"
#include "marsim/world.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace marsim {
namespace {

using Clock = std::chrono::steady_clock;
using testing::draw;
using testing::seeded_rng;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(const char* name, bool ok, const std::string& details) {
    std::printf("[ACCEPTANCE] %s - %s (%s)\n", ok ? "PASS" : "FAIL", name, details.c_str());
    EXPECT_TRUE(ok) << name << ": " << details;
}

// shared instance generation for the auction criteria
UtilityMatrix random_matrix(std::mt19937_64& rng, int agents, int goals) {
    auto m = UtilityMatrix::make(agents, goals);
    for (auto& row : m.u)
        for (auto& cell : row)
            if (draw(rng, 5) != 0) cell = 1 + draw(rng, 50);
    return m;
}

GoalId goal_for_column(int j) { return GoalId{GoalKind::Probe, j}; }

struct EpochSetup {
    std::vector<GoalId> goal_ids;
    std::map<AgentId, AuctionMachine> machines;
    MessageHarness harness;
};

EpochSetup make_epoch(const UtilityMatrix& m, const ChannelConfig& net,
                      const std::set<AgentId>& crashed = {}) {
    std::vector<std::pair<AgentId, Team>> roster;
    for (int a = 0; a < m.agents; ++a) roster.emplace_back(a, Team::A);
    std::vector<GoalId> goal_ids;
    for (int j = 0; j < m.goals; ++j) goal_ids.push_back(goal_for_column(j));
    ChannelConfig cfg = net;
    for (AgentId c : crashed) cfg.crashed_from[c] = 0;
    EpochSetup setup{goal_ids, {}, MessageHarness(roster, cfg)};
    const AuctionConstants consts{2, 2, m.agents + 2};
    for (int a = 0; a < m.agents; ++a) {
        if (crashed.count(a)) continue;
        std::vector<AgentId> teammates;
        for (int other = 0; other < m.agents; ++other)
            if (other != a) teammates.push_back(other);
        std::map<GoalId, int> utilities;
        for (int j = 0; j < m.goals; ++j)
            if (m.u[a][j]) utilities[goal_ids[j]] = *m.u[a][j];
        setup.machines.emplace(
            a, AuctionMachine(a, 0, std::move(teammates), std::move(utilities), consts));
    }
    return setup;
}

std::map<GoalId, AgentId> greedy_owner_map(const UtilityMatrix& m,
                                           const std::vector<GoalId>& goal_ids) {
    std::map<GoalId, AgentId> expected;
    for (const auto& [a, g] : greedy_assignment_oracle(m).agent_goal)
        expected[goal_ids[g]] = a;
    return expected;
}

bool ledgers_identical(const std::map<AgentId, AuctionMachine>& machines) {
    const AssignmentLedger* first = nullptr;
    for (const auto& [id, m] : machines) {
        (void)id;
        if (!first) {
            first = &m.ledger();
            continue;
        }
        if (m.ledger().owner != first->owner ||
            m.ledger().assigned_agents != first->assigned_agents)
            return false;
    }
    return true;
}

TEST(Acceptance, AuctionAgreementLossless) {
    const auto t0 = Clock::now();
    int failures = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto rng = seeded_rng(mix64(seed, 1001));
        const int agents = 1 + draw(rng, 8);
        const int goals = 1 + draw(rng, 12);
        const auto m = random_matrix(rng, agents, goals);
        auto setup = make_epoch(m, ChannelConfig{0.0, {}, seed, {}});
        run_epoch(setup.harness, setup.machines, 0, (agents + 6) * 2 + 4);
        const auto expected = greedy_owner_map(m, setup.goal_ids);
        if (!ledgers_identical(setup.machines)) ++failures;
        for (const auto& [id, machine] : setup.machines) {
            (void)id;
            if (machine.ledger().owner != expected) {
                ++failures;
                break;
            }
        }
    }
    const double dt = seconds_since(t0);
    report("auction agreement, lossless: 100/100 ledgers equal greedy oracle",
           failures == 0 && dt < 10.0,
           std::to_string(100 - failures) + "/100 exact, " + std::to_string(dt) + " s");
}

TEST(Acceptance, ApproximationRatio) {
    const auto t0 = Clock::now();
    int below_half = 0;
    double ratio_sum = 0;
    int counted = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto rng = seeded_rng(mix64(seed, 1001));  // same instances as agreement
        const int agents = 1 + draw(rng, 8);
        const int goals = 1 + draw(rng, 12);
        const auto m = random_matrix(rng, agents, goals);
        const int greedy = greedy_assignment_oracle(m).total;
        const int optimal = optimal_assignment_oracle(m).total;
        if (optimal == 0) continue;
        const double ratio = static_cast<double>(greedy) / optimal;
        if (ratio < 0.5) ++below_half;
        ratio_sum += ratio;
        ++counted;
    }
    const double mean = counted ? ratio_sum / counted : 1.0;
    const double dt = seconds_since(t0);
    report("approximation: greedy/optimal >= 0.5 in every instance",
           below_half == 0 && dt < 10.0,
           "mean ratio " + std::to_string(mean) + " over " + std::to_string(counted) +
               " instances, " + std::to_string(dt) + " s");
}

TEST(Acceptance, FaultRobustness) {
    const auto t0 = Clock::now();
    int crash_failures = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto rng = seeded_rng(mix64(seed, 1002));
        const int agents = 2 + draw(rng, 7);
        const int goals = 1 + draw(rng, 12);
        const auto m = random_matrix(rng, agents, goals);
        const AgentId crashed = static_cast<AgentId>(seed % agents);
        auto setup = make_epoch(m, ChannelConfig{0.0, {}, seed, {}}, {crashed});
        run_epoch(setup.harness, setup.machines, 0, (agents + 6) * 2 + 4);
        UtilityMatrix reduced = m;
        for (auto& cell : reduced.u[crashed]) cell.reset();
        const auto expected = greedy_owner_map(reduced, setup.goal_ids);
        if (!ledgers_identical(setup.machines)) ++crash_failures;
        for (const auto& [id, machine] : setup.machines) {
            (void)id;
            if (machine.ledger().owner != expected) {
                ++crash_failures;
                break;
            }
        }
    }

    int identical = 0;
    int double_ownership = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto rng = seeded_rng(mix64(seed, 1003));
        const int agents = 2 + draw(rng, 7);
        const int goals = 1 + draw(rng, 12);
        const auto m = random_matrix(rng, agents, goals);
        auto setup = make_epoch(m, ChannelConfig{0.3, {}, mix64(seed, 9), {"bid"}});
        run_epoch(setup.harness, setup.machines, 0, (agents + 6) * 2 + 4);
        if (ledgers_identical(setup.machines)) ++identical;
        std::map<GoalId, int> self_claims;
        for (const auto& [id, machine] : setup.machines) {
            (void)id;
            if (auto g = machine.my_goal()) self_claims[*g]++;
        }
        for (const auto& [g, n] : self_claims) {
            (void)g;
            if (n > 1) {
                ++double_ownership;
                break;
            }
        }
    }
    const double dt = seconds_since(t0);
    report("fault robustness: crash-reduced greedy exact; bid loss converges",
           crash_failures == 0 && identical >= 99 && double_ownership == 0 && dt < 30.0,
           "crash " + std::to_string(100 - crash_failures) + "/100, loss identity " +
               std::to_string(identical) + "/100, double-ownership " +
               std::to_string(double_ownership) + "/100, " + std::to_string(dt) + " s");
}

TEST(Acceptance, PathfinderCorrectness) {
    const auto t0 = Clock::now();
    int plan_failures = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto rng = seeded_rng(mix64(seed, 1004));
        const int vertices = 2 + draw(rng, 11);
        const auto g = generate_world(rng, vertices, draw(rng, vertices));
        const CostModel model{1 + draw(rng, 5), 2 + draw(rng, 9), 1 + draw(rng, 9)};
        const VertexId start = draw(rng, vertices);
        const VertexId goal = draw(rng, vertices);
        const int energy = draw(rng, model.max_energy + 1);
        const auto plan = plan_path(g.adj, start, energy, goal, model);
        const auto want = testing::oracle_min_steps(g.adj, start, energy, goal, model);
        const bool match = want ? (plan && plan->steps() == *want &&
                                   validate_plan(g.adj, *plan, energy, model))
                                : !plan;
        if (!match) ++plan_failures;
    }

    int meet_failures = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto rng = seeded_rng(mix64(seed, 1005));
        const int vertices = 2 + draw(rng, 7);
        const auto g = generate_world(rng, vertices, draw(rng, vertices));
        const CostModel model{1 + draw(rng, 5), 2 + draw(rng, 9), 5};
        const VertexId rep = draw(rng, vertices);
        const VertexId dis = draw(rng, vertices);
        const int rep_e = draw(rng, model.max_energy + 1);
        const int dis_e = draw(rng, model.max_energy + 1);
        const auto got = meeting_point(g.adj, rep, rep_e, dis, dis_e, model);
        const auto want = testing::oracle_meeting_point(g.adj, rep, rep_e, dis, dis_e, model);
        bool match = got.has_value() == want.has_value();
        if (match && got) {
            match = got->meet == want->meet && got->steps_repairer == want->steps_repairer &&
                    got->steps_disabled == want->steps_disabled &&
                    (got->last_mover == LastMover::Repairer) == want->last_mover_is_repairer;
        }
        if (!match) ++meet_failures;
    }
    const double dt = seconds_since(t0);
    report("pathfinder: plan_path and meeting_point match brute force exactly",
           plan_failures == 0 && meet_failures == 0 && dt < 20.0,
           "plans " + std::to_string(200 - plan_failures) + "/200, meetings " +
               std::to_string(100 - meet_failures) + "/100, " + std::to_string(dt) + " s");
}

std::vector<NewFact> random_fact_pool(std::mt19937_64& rng, int vertices, int count) {
    std::vector<NewFact> pool;
    for (int i = 0; i < count; ++i) {
        switch (draw(rng, 4)) {
            case 0: {
                const VertexId v = draw(rng, vertices);
                pool.push_back(
                    VertexValueFact{v, 1 + static_cast<int>(mix64(v) % 10), draw(rng, 20)});
                break;
            }
            case 1: {
                VertexId a = draw(rng, vertices);
                VertexId b = draw(rng, vertices);
                if (a == b) b = (b + 1) % vertices;
                pool.push_back(EdgeExistsFact{EdgeKey{a, b}, draw(rng, 20)});
                break;
            }
            case 2: {
                VertexId a = draw(rng, vertices);
                VertexId b = draw(rng, vertices);
                if (a == b) b = (b + 1) % vertices;
                const EdgeKey e{a, b};
                pool.push_back(
                    EdgeWeightFact{e, 1 + static_cast<int>(mix64(e.a, e.b) % 9), draw(rng, 20)});
                break;
            }
            default: {
                const AgentId agent = draw(rng, 6);
                const int step = draw(rng, 20);
                const AgentId reporter = draw(rng, 6);
                const auto h = mix64(agent, step, reporter);
                pool.push_back(AgentSighting{agent, static_cast<VertexId>(h % vertices),
                                             static_cast<int>(h % 2 ? 10 : 0),
                                             static_cast<int>(h % 11), step, reporter});
                break;
            }
        }
    }
    return pool;
}

TEST(Acceptance, BeliefConvergence) {
    const auto t0 = Clock::now();
    int stream_failures = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto rng = seeded_rng(mix64(seed, 1006));
        const int vertices = 3 + draw(rng, 10);
        const auto pool = random_fact_pool(rng, vertices, 4 + draw(rng, 16));
        const int k = 2 + draw(rng, 4);
        std::vector<BeliefStore> stores;
        for (int i = 0; i < k; ++i) stores.emplace_back(i, vertices);
        for (int i = 0; i < k; ++i) {
            auto order = pool;
            std::shuffle(order.begin(), order.end(), rng);
            merge_beliefs(stores[i], order);
        }
        for (int i = 1; i < k; ++i)
            if (!world_view_equal(stores[0], stores[i])) {
                ++stream_failures;
                break;
            }
    }

    int algebra_failures = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        auto rng = seeded_rng(mix64(seed, 1007));
        const int vertices = 3 + draw(rng, 10);
        auto pool = random_fact_pool(rng, vertices, 3 + draw(rng, 12));
        BeliefStore ordered(0, vertices);
        merge_beliefs(ordered, pool);
        auto shuffled = pool;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const std::size_t cut = shuffled.size() / 2;
        BeliefStore grouped(0, vertices);
        merge_beliefs(grouped, {shuffled.begin(), shuffled.begin() + cut});
        merge_beliefs(grouped, {shuffled.begin() + cut, shuffled.end()});
        BeliefStore twice = ordered;
        merge_beliefs(twice, pool);
        if (!world_view_equal(ordered, grouped) || !world_view_equal(ordered, twice))
            ++algebra_failures;
    }
    const double dt = seconds_since(t0);
    report("belief convergence: random orders converge; merge algebra holds",
           stream_failures == 0 && algebra_failures == 0 && dt < 10.0,
           "streams " + std::to_string(200 - stream_failures) + "/200, merges " +
               std::to_string(500 - algebra_failures) + "/500, " + std::to_string(dt) + " s");
}

TEST(Acceptance, ZoneColoring) {
    const auto t0 = Clock::now();
    int failures = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto rng = seeded_rng(mix64(seed, 1008));
        const int vertices = 2 + draw(rng, 9);
        const auto g = generate_world(rng, vertices, draw(rng, vertices));
        const auto agents = testing::random_agents(rng, draw(rng, 7), vertices);
        const auto got = color_zones(g, agents);
        const auto want = testing::oracle_color_zones(g, agents);
        if (got.color_of != want.color_of || got.score_a != want.score_a ||
            got.score_b != want.score_b)
            ++failures;
    }

    // hand-verified six-cycle
    const auto g = make_world_graph(
        {1, 1, 1, 1, 1, 1}, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {4, 5, 1}, {5, 0, 1}});
    std::vector<AgentState> agents{testing::make_agent(0, Team::A, 0),
                                   testing::make_agent(1, Team::A, 2),
                                   testing::make_agent(2, Team::B, 3)};
    const auto six = color_zones(g, agents);
    const bool six_ok = six.score_a == 4 && six.score_b == 2;

    const double dt = seconds_since(t0);
    report("zone coloring: matches brute-force three-phase rule",
           failures == 0 && six_ok,
           std::to_string(200 - failures) + "/200 worlds, six-cycle " +
               (six_ok ? "reproduced" : "WRONG") + ", " + std::to_string(dt) + " s");
}

TEST(Acceptance, EndToEndRendezvous) {
    const auto t0 = Clock::now();
    int ok_count = 0;
    std::string first_failure;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        MatchConfig c;
        c.seed = seed;
        c.steps = 50;
        c.vertices = 10;
        c.extra_edges = 5;
        c.team_size = 3;
        c.max_energy = 20;
        c.recharge_rate = 6;
        c.occupy_goals = 2;
        c.fault_schedule.push_back({4, FaultDisable{1}});
        const auto log = run_match(c);

        int assign_step = -1;
        int bound = 2;  // already co-located at assignment
        for (const auto& r : log.records) {
            if (r.step < 4) continue;
            for (const auto& snap : r.agents) {
                if (snap.assigned && snap.assigned->kind == GoalKind::Repair &&
                    snap.assigned->target == 1 && assign_step < 0)
                    assign_step = r.step;
            }
            if (assign_step == r.step) {
                for (const auto& rv : r.rendezvous)
                    if (rv.patient == 1) bound = rv.steps_repairer + rv.steps_disabled + 2;
            }
        }
        int repaired_step = -1;
        for (const auto& r : log.records) {
            if (r.step <= assign_step) continue;
            for (const auto& snap : r.agents)
                if (snap.id == 1 && snap.health > 0 && repaired_step < 0) repaired_step = r.step;
        }
        const bool ok =
            assign_step >= 4 && repaired_step > 0 && repaired_step <= assign_step + bound;
        if (ok) {
            ++ok_count;
        } else if (first_failure.empty()) {
            first_failure = "seed " + std::to_string(seed) + " assign " +
                            std::to_string(assign_step) + " repaired " +
                            std::to_string(repaired_step) + " bound " + std::to_string(bound);
        }
    }
    const double dt = seconds_since(t0);
    report("end-to-end rendezvous: repaired within stepsR+stepsD+2 of assignment",
           ok_count == 20,
           std::to_string(ok_count) + "/20 seeds" +
               (first_failure.empty() ? "" : ", first failure: " + first_failure) + ", " +
               std::to_string(dt) + " s");
}

TEST(Acceptance, DeterminismAndPerformance) {
    MatchConfig c;
    c.seed = 2026;
    c.steps = 750;
    c.vertices = 400;
    c.extra_edges = 600;
    c.team_size = 20;
    c.max_energy = 30;
    c.recharge_rate = 10;
    c.occupy_goals = 8;

    const auto t1 = Clock::now();
    const auto log1 = run_match(c);
    const double run1 = seconds_since(t1);
    const auto t2 = Clock::now();
    const auto log2 = run_match(c);
    const double run2 = seconds_since(t2);

    const auto bytes1 = match_log_to_jsonl(log1);
    const auto bytes2 = match_log_to_jsonl(log2);
    const bool identical = bytes1 == bytes2;
    const bool fast = run1 < 60.0 && run2 < 60.0;
    report("determinism and performance: 750-step 400-vertex match",
           identical && fast,
           std::string(identical ? "byte-identical" : "DIVERGENT") + ", runs " +
               std::to_string(run1) + " s / " + std::to_string(run2) + " s, " +
               std::to_string(bytes1.size()) + " bytes");
}

}  // namespace
}  // namespace marsim
