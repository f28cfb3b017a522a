#ifndef STEPSIM_TESTS_MINI_PORT_HPP
#define STEPSIM_TESTS_MINI_PORT_HPP

// Single-server egress port driver for scheduler tests: offers a timed
// arrival trace to a qdisc and serializes dequeued packets at a fixed line
// rate. Mirrors the Simulation port rules (arrivals settle before a
// same-instant dequeue; the packet in service holds no buffer slot).

#include <utility>
#include <vector>

#include "stepsim/qdisc.hpp"

namespace testsupport {

struct TimedPacket {
    stepsim::SimTime t;
    stepsim::Packet packet;
};

struct Departure {
    stepsim::Packet packet;
    stepsim::SimTime start;
    stepsim::SimTime finish;
};

struct DriveResult {
    std::vector<Departure> departures;
    std::vector<stepsim::Packet> dropped;
};

inline stepsim::SimTime serialization(const stepsim::Packet& p, std::uint64_t rate_bps) {
    const std::uint64_t num = p.size_bits() * 1'000'000'000ull + rate_bps / 2;
    return stepsim::SimTime::from_ns(static_cast<std::int64_t>(num / rate_bps));
}

// `arrivals` must be sorted by time (stable for ties).
inline DriveResult drive_port(stepsim::Qdisc& q, const std::vector<TimedPacket>& arrivals,
                              std::uint64_t rate_bps) {
    DriveResult out;
    std::size_t next = 0;
    stepsim::SimTime clock;

    auto admit = [&](stepsim::SimTime up_to) {
        while (next < arrivals.size() && arrivals[next].t <= up_to) {
            if (q.enqueue(arrivals[next].packet, arrivals[next].t) ==
                stepsim::EnqueueOutcome::Dropped) {
                out.dropped.push_back(arrivals[next].packet);
            }
            ++next;
        }
    };

    while (true) {
        if (q.empty()) {
            if (next >= arrivals.size()) break;
            clock = std::max(clock, arrivals[next].t);
            admit(clock);
            continue;
        }
        auto pkt = q.dequeue(clock);
        const stepsim::SimTime finish = clock + serialization(*pkt, rate_bps);
        admit(finish); // arrivals during (and at the end of) this service
        out.departures.push_back(Departure{*pkt, clock, finish});
        clock = finish;
    }
    return out;
}

} // namespace testsupport

#endif
