#ifndef STEPSIM_ENGINE_HPP
#define STEPSIM_ENGINE_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <queue>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "stepsim/error.hpp"
#include "stepsim/event.hpp"
#include "stepsim/rng.hpp"
#include "stepsim/time.hpp"

namespace stepsim {

/// Deterministic discrete-event engine: clock, time-ordered event queue,
/// seeded stream factory. The engine knows nothing about network semantics;
/// behavior lives in the handlers registered per event kind.
///
/// Single-threaded per run. Independent Engine instances never share state.
class Engine {
public:
    using Handler = std::function<void(Engine&, const Event&)>;

    explicit Engine(std::uint64_t seed) : seed_(seed) {}

    SimTime now() const { return now_; }
    std::uint64_t seed() const { return seed_; }

    /// Stores the event for firing in (fire_at, sequence) order.
    /// Throws SchedulingInPast if fire_at < now().
    EventHandle schedule(Event ev);

    EventHandle schedule(SimTime fire_at, EventKind kind, std::uint32_t target = 0,
                         std::uint32_t payload = 0) {
        return schedule(Event{fire_at, 0, kind, target, payload});
    }

    /// Cancels a pending event; firing it later becomes a no-op. Cancelling
    /// an already-fired handle has no effect.
    void cancel(EventHandle h) { cancelled_.insert(h.sequence); }

    void set_handler(EventKind kind, Handler fn) { handlers_[index(kind)] = std::move(fn); }

    /// Pops events with fire_at <= t_end in order, dispatching each to its
    /// kind's handler. The clock finishes at t_end even if the queue drains
    /// early; events beyond t_end stay queued.
    RunStats run_until(SimTime t_end);

    /// Fresh stream for (seed, label); calling twice replays the sequence.
    RandomStream rng_stream(std::string_view label) const { return {seed_, label}; }

    /// When enabled, every processed event is appended here. Test hook for
    /// trace-equality checks; off by default.
    void record_trace(bool on) { trace_on_ = on; }
    const std::vector<Event>& trace() const { return trace_; }

    std::size_t pending_events() const { return queue_.size(); }

private:
    static std::size_t index(EventKind k) { return static_cast<std::size_t>(k); }

    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
            return a.sequence > b.sequence;
        }
    };

    std::uint64_t seed_;
    SimTime now_;
    std::uint64_t next_sequence_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::unordered_set<std::uint64_t> cancelled_;
    std::array<Handler, 5> handlers_{};
    bool trace_on_ = false;
    std::vector<Event> trace_;
};

} // namespace stepsim

#endif
