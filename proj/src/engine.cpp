#include "stepsim/engine.hpp"

namespace stepsim {

EventHandle Engine::schedule(Event ev) {
    if (ev.fire_at < now_) {
        throw SchedulingInPast("schedule: fire_at " + std::to_string(ev.fire_at.ns) +
                               "ns is before now " + std::to_string(now_.ns) + "ns");
    }
    ev.sequence = next_sequence_++;
    queue_.push(ev);
    return EventHandle{ev.sequence};
}

RunStats Engine::run_until(SimTime t_end) {
    RunStats stats;
    while (!queue_.empty() && queue_.top().fire_at <= t_end) {
        Event ev = queue_.top();
        queue_.pop();
        if (!cancelled_.empty() && cancelled_.erase(ev.sequence) > 0) continue;
        now_ = ev.fire_at;
        if (trace_on_) trace_.push_back(ev);
        stats.events_processed++;
        auto& fn = handlers_[index(ev.kind)];
        if (fn) fn(*this, ev);
    }
    if (t_end > now_) now_ = t_end;
    stats.end_time = now_;
    return stats;
}

} // namespace stepsim
