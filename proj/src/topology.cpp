#include "stepsim/topology.hpp"

#include <cmath>
#include <stdexcept>

#include "stepsim/detail/format.hpp"
#include "stepsim/error.hpp"

namespace stepsim {

const Node* Topology::find_node(const std::string& name) const {
    for (const auto& n : nodes) {
        if (n.name == name) return &n;
    }
    return nullptr;
}

std::vector<NodeId> Topology::host_ids() const {
    std::vector<NodeId> ids;
    for (const auto& n : nodes) {
        if (n.kind == NodeKind::Host) ids.push_back(n.id);
    }
    return ids;
}

std::string Topology::adjacency_dump() const {
    std::string out;
    for (const auto& l : links) {
        out += nodes[l.src].name;
        out += ' ';
        out += nodes[l.dst].name;
        out += ' ';
        out += std::to_string(l.rate_bps);
        out += ' ';
        out += std::to_string(l.prop_delay.ns);
        out += ' ';
        out += detail::format_double(l.ber);
        out += '\n';
    }
    return out;
}

const std::vector<LinkId>& RoutingTable::route(NodeId src, NodeId dst) const {
    auto it = routes.find({src, dst});
    if (it == routes.end()) {
        throw std::out_of_range("no route for host pair " + std::to_string(src) + "->" +
                                std::to_string(dst));
    }
    return it->second;
}

Topology build_step_topology(const StepSpec& spec) {
    if (spec.steps < 1) throw InvalidSpec("steps must be >= 1");
    if (spec.hosts_per_step < 1) throw InvalidSpec("hosts_per_step must be >= 1");
    if (spec.backbone_rate_bps == 0) throw InvalidSpec("backbone_rate_bps must be > 0");
    if (spec.access_rate_bps == 0) throw InvalidSpec("access_rate_bps must be > 0");
    if (spec.backbone_prop_delay.ns < 0 || spec.access_prop_delay.ns < 0)
        throw InvalidSpec("propagation delay must be >= 0");
    if (spec.ber < 0.0 || spec.ber >= 1.0) throw InvalidSpec("ber must be in [0,1)");

    Topology topo;
    topo.spec = spec;
    const std::uint32_t s = spec.steps;
    const std::uint32_t h = spec.hosts_per_step;

    topo.nodes.reserve(static_cast<std::size_t>(s) * (1 + h));
    for (std::uint32_t i = 0; i < s; ++i) {
        Node n;
        n.id = static_cast<NodeId>(topo.nodes.size());
        n.kind = NodeKind::Router;
        n.step = i;
        n.name = "r" + std::to_string(i);
        topo.nodes.push_back(std::move(n));
    }
    for (std::uint32_t i = 0; i < s; ++i) {
        for (std::uint32_t j = 0; j < h; ++j) {
            Node n;
            n.id = static_cast<NodeId>(topo.nodes.size());
            n.kind = NodeKind::Host;
            n.step = i;
            n.host_index = j;
            n.name = "h" + std::to_string(i) + "." + std::to_string(j);
            topo.nodes.push_back(std::move(n));
        }
    }

    topo.out_links.resize(topo.nodes.size());
    auto add_link = [&](NodeId src, NodeId dst, std::uint64_t rate, SimTime prop) {
        Link l;
        l.id = static_cast<LinkId>(topo.links.size());
        l.src = src;
        l.dst = dst;
        l.rate_bps = rate;
        l.prop_delay = prop;
        l.ber = spec.ber;
        topo.out_links[src].push_back(l.id);
        topo.links.push_back(l);
    };

    // Backbone pairs r_i <-> r_{i+1}, then access pairs in (step, host) order.
    for (std::uint32_t i = 0; i + 1 < s; ++i) {
        add_link(i, i + 1, spec.backbone_rate_bps, spec.backbone_prop_delay);
        add_link(i + 1, i, spec.backbone_rate_bps, spec.backbone_prop_delay);
    }
    for (std::uint32_t i = 0; i < s; ++i) {
        for (std::uint32_t j = 0; j < h; ++j) {
            NodeId host = s + i * h + j;
            add_link(host, i, spec.access_rate_bps, spec.access_prop_delay);
            add_link(i, host, spec.access_rate_bps, spec.access_prop_delay);
        }
    }
    return topo;
}

RoutingTable compute_routes(const Topology& topo) {
    // The router subgraph is a path, so the host->host route is forced:
    // up the access link, along the chain, down the access link. Build a
    // (src,dst) -> link index for the two link classes we need.
    std::map<std::pair<NodeId, NodeId>, LinkId> by_ends;
    for (const auto& l : topo.links) by_ends[{l.src, l.dst}] = l.id;

    RoutingTable table;
    auto hosts = topo.host_ids();
    for (NodeId u : hosts) {
        for (NodeId v : hosts) {
            if (u == v) continue;
            const Node& a = topo.nodes[u];
            const Node& b = topo.nodes[v];
            std::vector<LinkId> path;
            path.push_back(by_ends.at({u, a.step}));
            std::uint32_t r = a.step;
            while (r != b.step) {
                std::uint32_t next = r < b.step ? r + 1 : r - 1;
                path.push_back(by_ends.at({r, next}));
                r = next;
            }
            path.push_back(by_ends.at({b.step, v}));
            table.routes.emplace(std::make_pair(u, v), std::move(path));
        }
    }
    return table;
}

SimTime link_transmission_delay(const Link& link, std::uint32_t size_bytes) {
    const std::uint64_t bits = static_cast<std::uint64_t>(size_bytes) * 8;
    const std::uint64_t num = bits * 1'000'000'000ull + link.rate_bps / 2;
    return SimTime::from_ns(static_cast<std::int64_t>(num / link.rate_bps));
}

double link_error_probability(const Link& link, std::uint32_t size_bytes) {
    if (link.ber <= 0.0) return 0.0;
    const double bits = 8.0 * static_cast<double>(size_bytes);
    // 1 - (1-b)^bits, evaluated in log space to stay exact for tiny b.
    return -std::expm1(bits * std::log1p(-link.ber));
}

} // namespace stepsim
