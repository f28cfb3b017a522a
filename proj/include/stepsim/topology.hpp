#ifndef STEPSIM_TOPOLOGY_HPP
#define STEPSIM_TOPOLOGY_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stepsim/time.hpp"

namespace stepsim {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;

/// Parameters of a step topology: S routers in a chain, H hosts star-attached
/// to each router. Links are full duplex, modeled as directed pairs.
struct StepSpec {
    std::uint32_t steps = 1;
    std::uint32_t hosts_per_step = 1;
    std::uint64_t backbone_rate_bps = 10'000'000; // 10BaseT default
    std::uint64_t access_rate_bps = 10'000'000;
    SimTime backbone_prop_delay = SimTime::from_ns(5'000); // ~1 km of cable
    SimTime access_prop_delay = SimTime::from_ns(5'000);
    double ber = 0.0; // per-bit error probability, [0,1)
};

enum class NodeKind : std::uint8_t { Router, Host };

struct Node {
    NodeId id = 0;
    NodeKind kind = NodeKind::Router;
    std::uint32_t step = 0;       // router chain position
    std::uint32_t host_index = 0; // within the step; unused for routers
    std::string name;             // "r<step>" / "h<step>.<index>"
};

struct Link {
    LinkId id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    std::uint64_t rate_bps = 0;
    SimTime prop_delay;
    double ber = 0.0;
};

struct Topology {
    StepSpec spec;
    std::vector<Node> nodes;               // routers first, then hosts, id == index
    std::vector<Link> links;               // id == index, construction order
    std::vector<std::vector<LinkId>> out_links; // per node

    const Node* find_node(const std::string& name) const;
    std::vector<NodeId> host_ids() const;

    /// One line per directed link: `src dst rate_bps prop_delay_ns ber`,
    /// in link-id order.
    std::string adjacency_dump() const;
};

/// Static route per ordered host pair: access up-link, backbone hops along
/// the router chain, access down-link. route(u,v) is route(v,u) reversed
/// link-for-link (each link swapped for its twin).
struct RoutingTable {
    std::map<std::pair<NodeId, NodeId>, std::vector<LinkId>> routes;

    const std::vector<LinkId>& route(NodeId src, NodeId dst) const;
};

/// Throws InvalidSpec when the spec invariants fail. Node and link ids are
/// assigned deterministically from (step, host index).
Topology build_step_topology(const StepSpec& spec);

RoutingTable compute_routes(const Topology& topo);

/// Serialization time only; propagation is added at delivery scheduling.
/// Rounded to the nearest nanosecond.
SimTime link_transmission_delay(const Link& link, std::uint32_t size_bytes);

/// Probability that at least one of the packet's 8L bits flips:
/// 1 - (1 - ber)^(8L). Zero-ber links never corrupt.
double link_error_probability(const Link& link, std::uint32_t size_bytes);

} // namespace stepsim

#endif
