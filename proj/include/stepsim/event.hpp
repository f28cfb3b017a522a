#ifndef STEPSIM_EVENT_HPP
#define STEPSIM_EVENT_HPP

#include <cstdint>

#include "stepsim/time.hpp"

namespace stepsim {

enum class EventKind : std::uint8_t {
    SourceEmit,
    LinkDeliver,
    PortDequeueReady,
    StatsSample,
    RunEnd,
};

/// One scheduled action. (fire_at, sequence) is the total-order key; sequence
/// is assigned by the engine in insertion order, so simultaneous events fire
/// in the order they were scheduled.
struct Event {
    SimTime fire_at;
    std::uint64_t sequence = 0; // engine-assigned
    EventKind kind = EventKind::StatsSample;
    std::uint32_t target = 0;  // component index, dispatched on by handlers
    std::uint32_t payload = 0; // optional packet slot / opaque value
};

struct EventHandle {
    std::uint64_t sequence = 0;
};

struct RunStats {
    std::uint64_t events_processed = 0;
    SimTime end_time;
};

} // namespace stepsim

#endif
