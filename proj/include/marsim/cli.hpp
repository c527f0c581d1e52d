#pragma once

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "marsim/auction.hpp"
#include "marsim/config.hpp"
#include "marsim/matchlog.hpp"
#include "marsim/sim.hpp"

namespace marsim {

// exit codes: 0 ok, 2 bad input/config, 3 write failure
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitWriteFailure = 3;

inline int cmd_run(const std::optional<std::string>& config_path,
                   const std::optional<std::uint64_t>& seed, const std::optional<int>& steps,
                   const std::optional<std::string>& out_path,
                   const std::optional<std::string>& net_log_path, std::ostream& out,
                   std::ostream& err) {
    RunConfig rc;
    try {
        if (config_path) {
            std::ifstream in(*config_path);
            if (!in) {
                err << "cannot read config: " << *config_path << '\n';
                return kExitBadInput;
            }
            rc = load_run_config(in);
        }
        // flags override config-file values
        if (seed) rc.match.seed = *seed;
        if (steps) rc.match.steps = *steps;
        if (out_path) rc.out_path = *out_path;
        rc.match.validate();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitBadInput;
    }

    std::vector<NetEvent> net_events;
    MatchLog log = run_match(rc.match, net_log_path ? &net_events : nullptr);
    if (net_log_path) {
        std::ofstream f(*net_log_path, std::ios::binary);
        if (!f) {
            err << "cannot open net log: " << *net_log_path << '\n';
            return kExitWriteFailure;
        }
        for (const auto& e : net_events) f << e.to_line() << '\n';
    }

    if (rc.out_path) {
        std::ofstream f(*rc.out_path, std::ios::binary);
        if (!f) {
            err << "cannot open output: " << *rc.out_path << '\n';
            return kExitWriteFailure;
        }
        f << match_log_to_jsonl(log);
        if (!f.good()) {
            err << "write failed: " << *rc.out_path << '\n';
            return kExitWriteFailure;
        }
    }
    out << log.summary.score_a << ' ' << log.summary.score_b << ' ' << log.summary.winner
        << '\n';
    return kExitOk;
}

inline int cmd_oracle_assignment(const std::string& matrix_path, bool with_optimal,
                                 std::ostream& out, std::ostream& err) {
    UtilityMatrix m;
    try {
        std::ifstream in(matrix_path);
        if (!in) {
            err << "cannot read matrix: " << matrix_path << '\n';
            return kExitBadInput;
        }
        m = parse_utility_matrix(in);
    } catch (const std::invalid_argument& e) {
        err << "matrix error: " << e.what() << '\n';
        return kExitBadInput;
    }
    const AssignmentResult greedy = greedy_assignment_oracle(m);
    for (const auto& [agent, goal] : greedy.agent_goal)
        out << agent << ' ' << goal << ' ' << *m.u[agent][goal] << '\n';
    out << "total " << greedy.total << '\n';
    if (with_optimal) {
        AssignmentResult optimal;
        try {
            optimal = optimal_assignment_oracle(m);
        } catch (const std::length_error& e) {
            err << "matrix error: " << e.what() << '\n';
            return kExitBadInput;
        }
        out << "optimal " << optimal.total << '\n';
        const double ratio = optimal.total == 0
                                 ? 1.0
                                 : static_cast<double>(greedy.total) / optimal.total;
        out << "ratio " << std::fixed << std::setprecision(3) << ratio << '\n';
    }
    return kExitOk;
}

inline void print_step_record(const StepRecord& r, std::ostream& out) {
    out << "step " << r.step << "\n";
    out << "  score " << r.step_score_a << ":" << r.step_score_b << " cumulative "
        << r.cum_score_a << ":" << r.cum_score_b << " colored " << r.colored_a << ":"
        << r.colored_b << "\n";
    for (const auto& a : r.actions) {
        out << "  agent " << a.agent << " " << action_kind_name(a.action.kind);
        if (a.action.kind == ActionKind::Goto) out << " -> " << a.action.to;
        if (a.action.kind == ActionKind::Repair) out << " target " << a.action.target;
        out << (a.success ? " ok" : " failed");
        if (!a.issued) out << " (substituted)";
        out << "\n";
    }
    for (const auto& s : r.agents) {
        out << "  at " << s.id << ": v" << s.position << " energy " << s.energy << " health "
            << s.health;
        if (s.crashed) out << " crashed";
        if (s.assigned) out << " assigned " << s.assigned->to_string();
        out << "\n";
    }
    for (const auto& rv : r.rendezvous)
        out << "  rendezvous repairer " << rv.repairer << " patient " << rv.patient << " meet v"
            << rv.meet << " steps " << rv.steps_repairer << "/" << rv.steps_disabled << "\n";
}

inline int cmd_dump(const std::string& log_path, const std::optional<int>& step, bool scores,
                    std::ostream& out, std::ostream& err) {
    MatchLog log;
    try {
        std::ifstream in(log_path);
        if (!in) {
            err << "cannot read log: " << log_path << '\n';
            return kExitBadInput;
        }
        log = match_log_from_jsonl(in);
    } catch (const std::exception& e) {
        err << "log error: " << e.what() << '\n';
        return kExitBadInput;
    }
    if (scores) {
        out << "step score_a score_b cum_a cum_b\n";
        for (const auto& r : log.records)
            out << r.step << ' ' << r.step_score_a << ' ' << r.step_score_b << ' '
                << r.cum_score_a << ' ' << r.cum_score_b << '\n';
        return kExitOk;
    }
    if (step) {
        for (const auto& r : log.records) {
            if (r.step == *step) {
                print_step_record(r, out);
                return kExitOk;
            }
        }
        err << "step " << *step << " not in log\n";
        return kExitBadInput;
    }
    err << "dump: pass --step N or --scores\n";
    return kExitBadInput;
}

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"deterministic multi-agent zone-control simulator"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a match and write its log");
    std::string run_config;
    std::uint64_t run_seed = 0;
    int run_steps = 0;
    std::string run_out;
    std::string run_netlog;
    auto* config_opt = run->add_option("--config", run_config, "JSON config file");
    auto* seed_opt = run->add_option("--seed", run_seed, "override the config seed");
    auto* steps_opt = run->add_option("--steps", run_steps, "override the step count");
    auto* out_opt = run->add_option("--out", run_out, "write the match log here");
    auto* netlog_opt = run->add_option("--log-net", run_netlog, "write send/drop/deliver events");

    auto* oracle = app.add_subcommand("oracle", "centralized assignment oracles");
    auto* assignment = oracle->add_subcommand("assignment", "greedy (and optimal) assignment");
    std::string matrix_path;
    bool with_optimal = false;
    assignment->add_option("--matrix", matrix_path, "utility matrix file")->required();
    assignment->add_flag("--optimal", with_optimal, "also print the optimum and the ratio");

    auto* dump = app.add_subcommand("dump", "inspect a match log");
    std::string dump_log;
    int dump_step = 0;
    bool dump_scores = false;
    dump->add_option("--log", dump_log, "match log file")->required();
    auto* step_opt = dump->add_option("--step", dump_step, "print one step record");
    dump->add_flag("--scores", dump_scores, "print per-step score columns");

    std::vector<const char*> argv;
    argv.push_back("marsim");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitBadInput;
    }

    try {
        if (run->parsed()) {
            return cmd_run(config_opt->count() ? std::optional(run_config) : std::nullopt,
                           seed_opt->count() ? std::optional(run_seed) : std::nullopt,
                           steps_opt->count() ? std::optional(run_steps) : std::nullopt,
                           out_opt->count() ? std::optional(run_out) : std::nullopt,
                           netlog_opt->count() ? std::optional(run_netlog) : std::nullopt, out,
                           err);
        }
        if (oracle->parsed() && assignment->parsed())
            return cmd_oracle_assignment(matrix_path, with_optimal, out, err);
        if (dump->parsed())
            return cmd_dump(dump_log, step_opt->count() ? std::optional(dump_step) : std::nullopt,
                            dump_scores, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitBadInput;
    }
    err << app.help();
    return kExitBadInput;
}

}  // namespace marsim
