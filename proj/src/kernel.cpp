#include "gridecon/kernel.hpp"

namespace gridecon::sim {

std::uint64_t SimEngine::schedule(SimTime at, std::string kind, Handler fn) {
    if (at < now_)
        throw std::logic_error("schedule: event at " + std::to_string(at) +
                               " is in the past (now=" + std::to_string(now_) + ")");
    std::uint64_t seq = next_seq_++;
    queue_.push(Ev{at, seq, std::move(kind), std::move(fn)});
    return seq;
}

SimEngine::RunStats SimEngine::run_until(SimTime stop) {
    if (stop < now_) throw std::logic_error("run_until: stop before current time");
    RunStats stats;
    while (!queue_.empty() && queue_.top().at <= stop) {
        Ev ev = queue_.top();
        queue_.pop();
        now_ = ev.at;
        try {
            ev.fn(*this);
        } catch (const std::exception& e) {
            throw EngineError(ev.at, ev.seq, ev.kind, e.what());
        }
        ++stats.events_processed;
    }
    now_ = stop;
    stats.clock = now_;
    return stats;
}

}  // namespace gridecon::sim
