#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "stepsim/error.hpp"
#include "stepsim/topology.hpp"

using namespace stepsim;

namespace {

// Brute-force BFS shortest path over node ids, the independent route oracle.
std::vector<LinkId> bfs_route(const Topology& topo, NodeId src, NodeId dst) {
    std::map<NodeId, LinkId> via;
    std::set<NodeId> seen{src};
    std::deque<NodeId> frontier{src};
    while (!frontier.empty()) {
        NodeId u = frontier.front();
        frontier.pop_front();
        if (u == dst) break;
        for (LinkId l : topo.out_links[u]) {
            NodeId v = topo.links[l].dst;
            if (seen.insert(v).second) {
                via[v] = l;
                frontier.push_back(v);
            }
        }
    }
    std::vector<LinkId> path;
    NodeId cur = dst;
    while (cur != src) {
        LinkId l = via.at(cur);
        path.push_back(l);
        cur = topo.links[l].src;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

} // namespace

TEST_CASE("minimal topology: one step, one host") {
    auto topo = build_step_topology(StepSpec{.steps = 1, .hosts_per_step = 1});
    CHECK(topo.nodes.size() == 2);
    CHECK(topo.host_ids().size() == 1);
    CHECK(topo.links.size() == 2); // access pair only
    CHECK(topo.find_node("r0") != nullptr);
    CHECK(topo.find_node("h0.0") != nullptr);
}

TEST_CASE("4x2 topology matches the closed-form counts") {
    auto topo = build_step_topology(StepSpec{.steps = 4, .hosts_per_step = 2});
    CHECK(topo.host_ids().size() == 8);
    std::size_t backbone = 0;
    std::size_t access = 0;
    for (const auto& l : topo.links) {
        const bool router_ends = topo.nodes[l.src].kind == NodeKind::Router &&
                                 topo.nodes[l.dst].kind == NodeKind::Router;
        (router_ends ? backbone : access)++;
    }
    CHECK(backbone == 6);  // 2(S-1)
    CHECK(access == 16);   // 2SH
}

TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS_AS(build_step_topology(StepSpec{.steps = 0}), InvalidSpec);
    CHECK_THROWS_AS(build_step_topology(StepSpec{.steps = 2, .hosts_per_step = 0}), InvalidSpec);
    CHECK_THROWS_AS(build_step_topology(StepSpec{.steps = 2, .hosts_per_step = 1,
                                                 .backbone_rate_bps = 0}),
                    InvalidSpec);
    StepSpec bad_ber;
    bad_ber.ber = 1.0;
    CHECK_THROWS_AS(build_step_topology(bad_ber), InvalidSpec);
}

TEST_CASE("edge counts sweep: 2(S-1) backbone and 2SH access for S<=16, H<=8") {
    for (std::uint32_t s = 1; s <= 16; ++s) {
        for (std::uint32_t h = 1; h <= 8; ++h) {
            auto topo = build_step_topology(StepSpec{.steps = s, .hosts_per_step = h});
            std::size_t backbone = 0;
            for (const auto& l : topo.links) {
                if (topo.nodes[l.src].kind == NodeKind::Router &&
                    topo.nodes[l.dst].kind == NodeKind::Router) {
                    backbone++;
                }
            }
            CHECK(backbone == 2 * (s - 1));
            CHECK(topo.links.size() - backbone == 2 * static_cast<std::size_t>(s) * h);
        }
    }
}

TEST_CASE("router subgraph is a path: degree profile") {
    for (std::uint32_t s = 2; s <= 9; ++s) {
        auto topo = build_step_topology(StepSpec{.steps = s, .hosts_per_step = 2});
        std::map<NodeId, int> router_degree;
        for (const auto& l : topo.links) {
            if (topo.nodes[l.src].kind == NodeKind::Router &&
                topo.nodes[l.dst].kind == NodeKind::Router) {
                router_degree[l.src]++;
            }
        }
        int deg1 = 0;
        int deg2 = 0;
        for (auto [node, d] : router_degree) {
            if (d == 1) deg1++;
            if (d == 2) deg2++;
        }
        CHECK(deg1 == 2);
        CHECK(deg2 == static_cast<int>(s) - 2);
    }
}

TEST_CASE("removing one backbone link pair splits the routers into two components") {
    auto topo = build_step_topology(StepSpec{.steps = 5, .hosts_per_step = 1});
    for (std::uint32_t cut = 0; cut + 1 < 5; ++cut) {
        // BFS over routers, skipping the cut pair r_cut <-> r_cut+1.
        std::set<NodeId> seen{0};
        std::deque<NodeId> frontier{0};
        while (!frontier.empty()) {
            NodeId u = frontier.front();
            frontier.pop_front();
            for (LinkId l : topo.out_links[u]) {
                const auto& link = topo.links[l];
                if (topo.nodes[link.dst].kind != NodeKind::Router) continue;
                if ((link.src == cut && link.dst == cut + 1) ||
                    (link.src == cut + 1 && link.dst == cut)) {
                    continue;
                }
                if (seen.insert(link.dst).second) frontier.push_back(link.dst);
            }
        }
        CHECK(seen.size() == cut + 1); // exactly the routers left of the cut
    }
}

TEST_CASE("routes: same-step pair uses two access links, no backbone") {
    auto topo = build_step_topology(StepSpec{.steps = 2, .hosts_per_step = 2});
    auto routes = compute_routes(topo);
    NodeId a = topo.find_node("h0.0")->id;
    NodeId b = topo.find_node("h0.1")->id;
    const auto& path = routes.route(a, b);
    CHECK(path.size() == 2);
    CHECK(topo.links[path[0]].src == a);
    CHECK(topo.links[path[1]].dst == b);
}

TEST_CASE("routes: cross-chain pair has |i-j|+2 links") {
    auto topo = build_step_topology(StepSpec{.steps = 4, .hosts_per_step = 1});
    auto routes = compute_routes(topo);
    NodeId a = topo.find_node("h0.0")->id;
    NodeId b = topo.find_node("h3.0")->id;
    CHECK(routes.route(a, b).size() == 5); // 2 access + 3 backbone
}

TEST_CASE("route(u,v) is route(v,u) reversed link-for-link") {
    auto topo = build_step_topology(StepSpec{.steps = 3, .hosts_per_step = 2});
    auto routes = compute_routes(topo);
    auto hosts = topo.host_ids();
    for (NodeId u : hosts) {
        for (NodeId v : hosts) {
            if (u == v) continue;
            const auto& fwd = routes.route(u, v);
            const auto& rev = routes.route(v, u);
            REQUIRE(fwd.size() == rev.size());
            for (std::size_t i = 0; i < fwd.size(); ++i) {
                const Link& f = topo.links[fwd[i]];
                const Link& r = topo.links[rev[rev.size() - 1 - i]];
                CHECK(f.src == r.dst);
                CHECK(f.dst == r.src);
            }
        }
    }
}

TEST_CASE("routes equal the BFS oracle for S<=6, H<=3") {
    for (std::uint32_t s = 1; s <= 6; ++s) {
        for (std::uint32_t h = 1; h <= 3; ++h) {
            auto topo = build_step_topology(StepSpec{.steps = s, .hosts_per_step = h});
            auto routes = compute_routes(topo);
            auto hosts = topo.host_ids();
            for (NodeId u : hosts) {
                for (NodeId v : hosts) {
                    if (u == v) continue;
                    CHECK(routes.route(u, v) == bfs_route(topo, u, v));
                }
            }
        }
    }
}

TEST_CASE("serialization delay on a 10 Mbps link") {
    Link l;
    l.rate_bps = 10'000'000;
    CHECK(link_transmission_delay(l, 1500).ns == 1'200'000); // 1.2 ms
    CHECK(link_transmission_delay(l, 200).ns == 160'000);    // 160 us
}

TEST_CASE("per-packet corruption probability") {
    Link l;
    SUBCASE("zero ber never corrupts") {
        l.ber = 0.0;
        CHECK(link_error_probability(l, 1500) == 0.0);
    }
    SUBCASE("values match the independent log formulation and grow with length") {
        l.ber = 1e-5;
        const double p125 = link_error_probability(l, 125);
        const double p250 = link_error_probability(l, 250);
        CHECK(p125 == doctest::Approx(1.0 - std::exp(1000.0 * std::log(1.0 - 1e-5)))
                          .epsilon(1e-12));
        CHECK(p125 == doctest::Approx(0.00995012).epsilon(1e-5));
        CHECK(p250 == doctest::Approx(0.01980124).epsilon(1e-5));
        CHECK(p250 > p125);
    }
}

TEST_CASE("adjacency dump is stable and carries every directed link") {
    auto topo = build_step_topology(StepSpec{.steps = 2, .hosts_per_step = 1});
    const std::string dump = topo.adjacency_dump();
    CHECK(dump == topo.adjacency_dump());
    CHECK(std::count(dump.begin(), dump.end(), '\n') ==
          static_cast<std::ptrdiff_t>(topo.links.size()));
    CHECK(dump.find("r0 r1 10000000 5000 0\n") != std::string::npos);
    CHECK(dump.find("h0.0 r0 10000000 5000 0\n") != std::string::npos);
}
