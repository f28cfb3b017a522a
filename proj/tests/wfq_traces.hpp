#ifndef STEPSIM_TESTS_WFQ_TRACES_HPP
#define STEPSIM_TESTS_WFQ_TRACES_HPP

// Random small-trace generator plus the WFQ-vs-fluid-GPS deviation check
// shared by the scheduler unit tests and the acceptance suite.

#include <algorithm>
#include <string>
#include <vector>

#include "gps_oracle.hpp"
#include "mini_port.hpp"
#include "stepsim/qdisc.hpp"
#include "stepsim/rng.hpp"

namespace testsupport {

struct WfqTrace {
    std::vector<TimedPacket> arrivals;        // sorted by time
    std::vector<gps::Arrival> oracle_arrivals; // same packets, oracle form
    std::vector<double> weights;               // per flow index == ToS
    double max_packet_bits = 0.0;
    std::uint64_t rate_bps = 1'000'000;
};

// Up to 3 flows and 50 packets, clustered arrivals, mixed sizes. Flow k is
// encoded as ToS k with dedicated hosts so FlowKeys stay distinct.
inline WfqTrace make_random_trace(stepsim::RandomStream& rng) {
    WfqTrace trace;
    const int nflows = 1 + static_cast<int>(rng.next_u64() % 3);
    for (int f = 0; f < nflows; ++f) {
        trace.weights.push_back(0.5 + 5.5 * rng.uniform01());
    }
    const int npackets = 2 + static_cast<int>(rng.next_u64() % 49);
    double t = 0.0;
    std::uint64_t id = 0;
    for (int i = 0; i < npackets; ++i) {
        // bursts: 40% of packets share the previous arrival instant
        if (rng.uniform01() > 0.4) t += rng.exponential(0.004);
        const int flow = static_cast<int>(rng.next_u64() % nflows);
        const std::uint32_t bytes = 25 + static_cast<std::uint32_t>(rng.next_u64() % 1476);

        stepsim::Packet p;
        p.id = id++;
        p.src = static_cast<stepsim::NodeId>(flow);
        p.dst = static_cast<stepsim::NodeId>(flow + 100);
        p.tos = static_cast<stepsim::ClassId>(flow);
        p.size_bytes = bytes;
        p.created_at = stepsim::SimTime::from_seconds(t);
        trace.arrivals.push_back(TimedPacket{p.created_at, p});
        trace.oracle_arrivals.push_back(
            gps::Arrival{p.created_at.seconds(), flow, static_cast<double>(bytes) * 8.0});
        trace.max_packet_bits = std::max(trace.max_packet_bits, static_cast<double>(bytes) * 8.0);
    }
    return trace;
}

// Runs the trace through a WfqQdisc behind a single-rate port and compares
// per-flow completed service against the fluid oracle at every departure
// epoch. Tag scheduling may run one packet ahead of or behind the fluid
// system, so the allowed deviation is one maximum packet size.
inline bool wfq_tracks_fluid_gps(const WfqTrace& trace, std::string* failure = nullptr) {
    stepsim::QdiscConfig config;
    config.kind = stepsim::QdiscKind::Wfq;
    config.buffer_capacity_packets = 1'000'000; // drops off for this check
    for (std::size_t f = 0; f < trace.weights.size(); ++f) {
        config.wfq_weights[static_cast<stepsim::ClassId>(f)] = trace.weights[f];
    }
    stepsim::WfqQdisc q(config.buffer_capacity_packets, trace.rate_bps, config);
    const DriveResult run = drive_port(q, trace.arrivals, trace.rate_bps);

    const auto oracle =
        gps::fluid_gps(trace.oracle_arrivals, trace.weights, static_cast<double>(trace.rate_bps));

    std::vector<double> completed(trace.weights.size(), 0.0);
    const double tolerance = trace.max_packet_bits + 1.0;
    for (const auto& dep : run.departures) {
        completed[dep.packet.tos] += static_cast<double>(dep.packet.size_bits());
        const double tau = dep.finish.seconds();
        for (std::size_t f = 0; f < trace.weights.size(); ++f) {
            const double fluid = oracle.service_at(static_cast<int>(f), tau);
            if (std::abs(completed[f] - fluid) > tolerance) {
                if (failure != nullptr) {
                    *failure = "flow " + std::to_string(f) + " at t=" + std::to_string(tau) +
                               ": packet-system " + std::to_string(completed[f]) +
                               " bits vs fluid " + std::to_string(fluid) + " bits (tolerance " +
                               std::to_string(tolerance) + ")";
                }
                return false;
            }
        }
    }
    if (run.departures.size() != trace.arrivals.size()) {
        if (failure != nullptr) *failure = "not every packet departed";
        return false;
    }
    return true;
}

} // namespace testsupport

#endif
