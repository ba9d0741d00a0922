#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridecon/rng.hpp"
#include "gridecon/trace.hpp"

namespace gridecon::sim {

struct EngineError : std::runtime_error {
    SimTime at;
    std::uint64_t seq;
    std::string kind;
    EngineError(SimTime t, std::uint64_t s, std::string k, const std::string& why)
        : std::runtime_error("event failed: kind=" + k + " at=" + std::to_string(t) +
                             " seq=" + std::to_string(s) + ": " + why),
          at(t),
          seq(s),
          kind(std::move(k)) {}
};

// Single-threaded discrete-event engine. The clock jumps event to event;
// events fire in (at, insertion-seq) order, so the same scenario and seed
// always produce the same trace.
class SimEngine {
public:
    explicit SimEngine(std::uint64_t seed) : seed_(seed) {}

    SimTime now() const { return now_; }
    std::uint64_t seed() const { return seed_; }

    using Handler = std::function<void(SimEngine&)>;

    // Throws std::logic_error when at < now(). Returns the insertion seq.
    std::uint64_t schedule(SimTime at, std::string kind, Handler fn);

    struct RunStats {
        std::uint64_t events_processed = 0;
        SimTime clock = 0;
    };

    // Processes every event with at <= stop; clock ends at stop.
    RunStats run_until(SimTime stop);

    std::size_t pending() const { return queue_.size(); }

    // Each actor draws from its own stream, derived from (seed, actor id)
    // alone, so adding or reordering actors never perturbs the others.
    Rng& actor_rng(std::string_view actor_id) {
        auto it = streams_.find(actor_id);
        if (it == streams_.end())
            it = streams_.emplace(std::string(actor_id), derive_stream(seed_, actor_id)).first;
        return it->second;
    }

    Trace& trace() { return trace_; }
    const Trace& trace() const { return trace_; }

private:
    struct Ev {
        SimTime at;
        std::uint64_t seq;
        std::string kind;
        Handler fn;
    };
    struct Later {
        bool operator()(const Ev& a, const Ev& b) const {
            if (a.at != b.at) return a.at > b.at;
            return a.seq > b.seq;
        }
    };

    std::uint64_t seed_;
    SimTime now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::priority_queue<Ev, std::vector<Ev>, Later> queue_;
    std::map<std::string, Rng, std::less<>> streams_;
    Trace trace_;
};

}  // namespace gridecon::sim
