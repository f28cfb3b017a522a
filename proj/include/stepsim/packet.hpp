#ifndef STEPSIM_PACKET_HPP
#define STEPSIM_PACKET_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "stepsim/error.hpp"
#include "stepsim/time.hpp"
#include "stepsim/topology.hpp"

namespace stepsim {

/// ToS class, [0,7]. Voice rides class 6, FTP/best-effort class 0.
using ClassId = std::uint8_t;

inline constexpr ClassId kTosBestEffort = 0;
inline constexpr ClassId kTosVoice = 6;
inline constexpr std::uint8_t kTosLevels = 8;

/// A conversation: (source host, destination host, ToS). The ordering is the
/// deterministic tie-breaker wherever "lower flow id" is called for.
struct FlowKey {
    NodeId src = 0;
    NodeId dst = 0;
    ClassId tos = 0;

    friend constexpr auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

std::string to_string(const FlowKey& f);

struct Packet {
    std::uint64_t id = 0; // unique per run
    NodeId src = 0;
    NodeId dst = 0;
    ClassId tos = 0;
    std::uint32_t size_bytes = 0;
    SimTime created_at;

    // Forwarding state: position along the precomputed route.
    const std::vector<LinkId>* route = nullptr;
    std::uint16_t hop = 0;

    FlowKey flow() const { return FlowKey{src, dst, tos}; }
    std::uint64_t size_bits() const { return static_cast<std::uint64_t>(size_bytes) * 8; }
};

/// Returns the packet's class; throws InvalidTos outside [0,7].
inline ClassId classify(const Packet& p) {
    if (p.tos >= kTosLevels) {
        throw InvalidTos("ToS " + std::to_string(p.tos) + " outside [0,7]");
    }
    return p.tos;
}

} // namespace stepsim

#endif
