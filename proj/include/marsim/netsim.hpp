#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "marsim/core.hpp"
#include "marsim/messages.hpp"

namespace marsim {

// The unit of the simulated transport. dst == nullopt means broadcast to the
// sender's live teammates.
struct Envelope {
    AgentId src = 0;
    std::optional<AgentId> dst;
    int step = 0;           // delivery tick of sending
    std::uint64_t seq = 0;  // per-sender monotone counter
    Message payload;
};

struct ChannelConfig {
    double drop_probability = 0.0;
    std::map<AgentId, int> crashed_from;  // agent -> first tick it is crashed
    std::uint64_t rng_seed = 0;
    // When non-empty, only these payload kinds are subject to drops.
    std::set<std::string> droppable_kinds;
};

struct NetEvent {
    int tick = 0;
    AgentId src = 0;
    AgentId dst = 0;  // -1 for a rejected broadcast with no recipients
    std::uint64_t seq = 0;
    std::string kind;
    std::string outcome;  // queued | dropped | delivered | dst_crashed | rejected

    std::string to_line() const {
        std::ostringstream os;
        os << tick << ' ' << src << ' ' << dst << ' ' << seq << ' ' << kind << ' ' << outcome;
        return os.str();
    }
};

// Single-owner simulated message server: 1-tick delivery latency, seeded
// per-copy drops, permanent (crash-stop) agent failures.
class MessageHarness {
public:
    MessageHarness(std::vector<std::pair<AgentId, Team>> roster, ChannelConfig config)
        : config_(std::move(config)) {
        for (const auto& [id, team] : roster) teams_[id] = team;
    }

    void enable_log(bool on) { log_enabled_ = on; }
    const std::vector<NetEvent>& log() const { return log_; }

    int current_tick() const { return current_tick_; }

    bool crashed_at(AgentId a, int tick) const {
        auto it = config_.crashed_from.find(a);
        return it != config_.crashed_from.end() && tick >= it->second;
    }

    // Enqueues a message for delivery at the next tick. Broadcast expands to
    // one independently dropped copy per live teammate. Returns false when
    // the sender is crashed; drops are silent.
    bool send(AgentId src, std::optional<AgentId> dst, Message payload) {
        if (!teams_.count(src)) throw std::invalid_argument("unknown sender");
        if (dst && !teams_.count(*dst)) throw std::invalid_argument("unknown recipient");
        if (crashed_at(src, current_tick_)) {
            record(current_tick_, src, dst ? *dst : -1, seq_[src], message_kind(payload),
                   "rejected");
            return false;
        }
        const std::uint64_t seq = seq_[src]++;
        ++sends_since_tick_;
        if (dst) {
            queue_copy(src, *dst, seq, payload);
            return true;
        }
        const Team team = teams_.at(src);
        for (const auto& [id, t] : teams_) {
            if (id == src || t != team) continue;
            if (crashed_at(id, current_tick_)) continue;
            queue_copy(src, id, seq, payload);
        }
        return true;
    }

    // Returns every envelope due at `tick`, grouped per recipient, FIFO per
    // (src, dst). Envelopes to crashed recipients are discarded.
    std::map<AgentId, std::vector<Envelope>> deliver_tick(int tick) {
        if (tick <= last_delivered_) throw std::logic_error("deliver_tick: tick not increasing");
        last_delivered_ = tick;
        current_tick_ = tick;
        sends_since_tick_ = 0;

        std::map<AgentId, std::vector<Envelope>> out;
        std::vector<Pending> keep;
        for (auto& p : pending_) {
            if (p.envelope.step >= tick) {
                keep.push_back(std::move(p));
                continue;
            }
            if (crashed_at(p.dst, tick)) {
                record(tick, p.envelope.src, p.dst, p.envelope.seq,
                       message_kind(p.envelope.payload), "dst_crashed");
                continue;
            }
            record(tick, p.envelope.src, p.dst, p.envelope.seq, message_kind(p.envelope.payload),
                   "delivered");
            out[p.dst].push_back(std::move(p.envelope));
        }
        pending_ = std::move(keep);
        for (auto& [dst, envs] : out) {
            std::stable_sort(envs.begin(), envs.end(), [](const Envelope& x, const Envelope& y) {
                return x.src != y.src ? x.src < y.src : x.seq < y.seq;
            });
        }
        return out;
    }

    // Swaps in a new fault configuration at a step boundary. Crashes are
    // permanent: removing or moving an existing crash entry is rejected.
    bool configure_faults(const ChannelConfig& config) {
        if (sends_since_tick_ > 0)
            throw std::logic_error("configure_faults: called mid-step");
        if (config.drop_probability < 0.0 || config.drop_probability > 1.0) return false;
        for (const auto& [agent, from] : config_.crashed_from) {
            auto it = config.crashed_from.find(agent);
            if (it == config.crashed_from.end() || it->second != from) return false;
        }
        config_ = config;
        return true;
    }

    const ChannelConfig& config() const { return config_; }

private:
    struct Pending {
        AgentId dst;
        Envelope envelope;
    };

    void queue_copy(AgentId src, AgentId dst, std::uint64_t seq, const Message& payload) {
        const char* kind = message_kind(payload);
        const bool droppable =
            config_.droppable_kinds.empty() || config_.droppable_kinds.count(kind) > 0;
        if (droppable && config_.drop_probability > 0.0) {
            // pure function of (seed, src, seq, dst): replays are bit-stable
            const std::uint64_t coin =
                mix64(config_.rng_seed, mix64(static_cast<std::uint64_t>(src), seq),
                      static_cast<std::uint64_t>(dst) + 1);
            if (unit_double(coin) < config_.drop_probability) {
                record(current_tick_, src, dst, seq, kind, "dropped");
                return;
            }
        }
        record(current_tick_, src, dst, seq, kind, "queued");
        pending_.push_back(Pending{dst, Envelope{src, dst, current_tick_, seq, payload}});
    }

    void record(int tick, AgentId src, AgentId dst, std::uint64_t seq, const char* kind,
                const char* outcome) {
        if (!log_enabled_) return;
        log_.push_back(NetEvent{tick, src, dst, seq, kind, outcome});
    }

    std::map<AgentId, Team> teams_;
    ChannelConfig config_;
    std::map<AgentId, std::uint64_t> seq_;
    std::vector<Pending> pending_;
    int current_tick_ = 0;
    int last_delivered_ = -1;
    int sends_since_tick_ = 0;
    bool log_enabled_ = false;
    std::vector<NetEvent> log_;
};

}  // namespace marsim
