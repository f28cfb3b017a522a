#include "stepsim/traffic.hpp"

#include "stepsim/error.hpp"

namespace stepsim {

std::vector<std::uint32_t> ftp_segment_sizes(std::uint64_t file_size_bytes,
                                             std::uint32_t segment_payload_bytes,
                                             std::uint32_t header_bytes) {
    std::vector<std::uint32_t> sizes;
    std::uint64_t remaining = file_size_bytes;
    while (remaining > 0) {
        const std::uint64_t payload = std::min<std::uint64_t>(remaining, segment_payload_bytes);
        sizes.push_back(static_cast<std::uint32_t>(payload) + header_bytes);
        remaining -= payload;
    }
    return sizes;
}

Packet VoipSource::make_packet(SimTime now, std::uint64_t id) const {
    Packet p;
    p.id = id;
    p.src = spec_.src;
    p.dst = spec_.dst;
    p.tos = spec_.tos;
    p.size_bytes = spec_.payload_bytes + spec_.header_bytes;
    p.created_at = now;
    return p;
}

std::uint64_t VoipSource::emission_count() const {
    if (spec_.stop <= spec_.start) return 0;
    const std::int64_t window = (spec_.stop - spec_.start).ns;
    const std::int64_t interval = spec_.frame_interval.ns;
    return static_cast<std::uint64_t>((window + interval - 1) / interval);
}

std::vector<Packet> FtpSource::make_request(SimTime now, std::uint64_t& next_id) const {
    std::vector<Packet> burst;
    for (std::uint32_t size : ftp_segment_sizes(spec_.file_size_bytes,
                                                spec_.segment_payload_bytes,
                                                spec_.header_bytes)) {
        Packet p;
        p.id = next_id++;
        p.src = spec_.src;
        p.dst = spec_.dst;
        p.tos = spec_.tos;
        p.size_bytes = size;
        p.created_at = now;
        burst.push_back(p);
    }
    return burst;
}

DeliveryRecord sink_receive(NodeId host, const Packet& p, SimTime now) {
    if (p.dst != host) {
        throw MisroutedPacket("packet " + std::to_string(p.id) + " for node " +
                              std::to_string(p.dst) + " arrived at node " + std::to_string(host));
    }
    DeliveryRecord rec;
    rec.packet_id = p.id;
    rec.created_at = p.created_at;
    rec.delivered_at = now;
    rec.src = p.src;
    rec.dst = p.dst;
    rec.tos = p.tos;
    rec.size_bytes = p.size_bytes;
    return rec;
}

} // namespace stepsim
