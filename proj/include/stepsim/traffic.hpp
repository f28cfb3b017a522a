#ifndef STEPSIM_TRAFFIC_HPP
#define STEPSIM_TRAFFIC_HPP

#include <cstdint>
#include <vector>

#include "stepsim/packet.hpp"
#include "stepsim/rng.hpp"
#include "stepsim/time.hpp"
#include "stepsim/topology.hpp"

namespace stepsim {

/// Constant-rate one-way voice: one payload+header packet every
/// frame_interval, ToS 6. Defaults model 64 kbps PCM framing: 160 payload
/// bytes per 20 ms frame plus 40 bytes of RTP/UDP/IP-equivalent header.
struct VoipSourceSpec {
    NodeId src = 0;
    NodeId dst = 0;
    SimTime frame_interval = SimTime::from_ns(20'000'000);
    std::uint32_t payload_bytes = 160;
    std::uint32_t header_bytes = 40;
    SimTime start;
    SimTime stop; // emission happens in [start, stop)
    ClassId tos = kTosVoice;
};

/// Open-loop bulk transfer: at each request epoch (exponential gaps) the
/// whole file is segmented and offered back-to-back, ToS 0. No transport
/// dynamics; the metric suite is queue-level.
struct FtpSourceSpec {
    NodeId src = 0;
    NodeId dst = 0;
    double mean_interrequest_s = 1.0;
    std::uint64_t file_size_bytes = 1'000'000;
    std::uint32_t segment_payload_bytes = 1460;
    std::uint32_t header_bytes = 40;
    SimTime start;
    SimTime stop;
    ClassId tos = kTosBestEffort;
};

struct DeliveryRecord {
    std::uint64_t packet_id = 0;
    SimTime created_at;
    SimTime delivered_at;
    NodeId src = 0;
    NodeId dst = 0;
    ClassId tos = 0;
    std::uint32_t size_bytes = 0;
};

/// On-wire sizes (payload+header) of the file's segments, in emission order.
/// ceil(file/payload) segments; the last carries the remainder.
std::vector<std::uint32_t> ftp_segment_sizes(std::uint64_t file_size_bytes,
                                             std::uint32_t segment_payload_bytes,
                                             std::uint32_t header_bytes);

class VoipSource {
public:
    explicit VoipSource(VoipSourceSpec spec) : spec_(spec) {}

    const VoipSourceSpec& spec() const { return spec_; }

    bool active_at(SimTime t) const { return t >= spec_.start && t < spec_.stop; }

    Packet make_packet(SimTime now, std::uint64_t id) const;

    SimTime next_emit(SimTime now) const { return now + spec_.frame_interval; }

    /// Emissions over the whole window; the deterministic cadence makes the
    /// count ceil((stop-start)/interval).
    std::uint64_t emission_count() const;

private:
    VoipSourceSpec spec_;
};

class FtpSource {
public:
    FtpSource(FtpSourceSpec spec, RandomStream stream)
        : spec_(spec), stream_(std::move(stream)) {}

    const FtpSourceSpec& spec() const { return spec_; }

    bool active_at(SimTime t) const { return t >= spec_.start && t < spec_.stop; }

    /// Segments for one request, all stamped with the epoch time.
    std::vector<Packet> make_request(SimTime now, std::uint64_t& next_id) const;

    /// One exponential draw from this source's stream.
    SimTime next_epoch(SimTime now) {
        return now + SimTime::from_seconds(stream_.exponential(spec_.mean_interrequest_s));
    }

private:
    FtpSourceSpec spec_;
    RandomStream stream_;
};

/// Builds the delivery record for a packet arriving at `host`; throws
/// MisroutedPacket when the packet is addressed elsewhere.
DeliveryRecord sink_receive(NodeId host, const Packet& p, SimTime now);

} // namespace stepsim

#endif
