#include <doctest.h>

#include <map>
#include <set>
#include <vector>

#include "stepsim/error.hpp"
#include "stepsim/qdisc.hpp"
#include "stepsim/rng.hpp"
#include "mini_port.hpp"
#include "wfq_traces.hpp"

using namespace stepsim;
using testsupport::drive_port;
using testsupport::TimedPacket;

namespace {

Packet mk(std::uint64_t id, ClassId tos, std::uint32_t bytes, SimTime t = {},
          NodeId src = 0, NodeId dst = 1) {
    Packet p;
    p.id = id;
    p.src = src;
    p.dst = dst;
    p.tos = tos;
    p.size_bytes = bytes;
    p.created_at = t;
    return p;
}

std::vector<TimedPacket> random_single_class_trace(RandomStream& rng, std::size_t n) {
    std::vector<TimedPacket> arrivals;
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.uniform01() > 0.3) t += rng.exponential(0.002);
        arrivals.push_back(TimedPacket{SimTime::from_seconds(t),
                                       mk(i, kTosVoice, 100 + rng.next_u64() % 1000,
                                          SimTime::from_seconds(t))});
    }
    return arrivals;
}

} // namespace

TEST_CASE("classify returns the ToS and rejects out-of-range values") {
    CHECK(classify(mk(1, kTosVoice, 200)) == 6);
    CHECK(classify(mk(2, kTosBestEffort, 1500)) == 0);
    CHECK_THROWS_AS(classify(mk(3, 9, 100)), InvalidTos);
}

TEST_CASE("fifo: accept when room, tail-drop when full") {
    FifoQdisc q(500);
    CHECK(q.enqueue(mk(0, 6, 200), SimTime::zero()) == EnqueueOutcome::Accepted);
    CHECK(q.occupancy() == 1);
    for (std::uint64_t i = 1; i < 500; ++i) q.enqueue(mk(i, 0, 200), SimTime::zero());
    CHECK(q.occupancy() == 500);
    CHECK(q.enqueue(mk(999, 6, 200), SimTime::zero()) == EnqueueOutcome::Dropped);
    CHECK(q.occupancy() == 500);
}

TEST_CASE("fifo departures replay the acceptance order") {
    FifoQdisc q(64);
    RandomStream rng(11, "fifo-order");
    auto arrivals = random_single_class_trace(rng, 200);
    auto result = drive_port(q, arrivals, 1'000'000);

    std::vector<std::uint64_t> accepted;
    std::set<std::uint64_t> dropped_ids;
    for (const auto& d : result.dropped) dropped_ids.insert(d.id);
    for (const auto& a : arrivals) {
        if (dropped_ids.count(a.packet.id) == 0) accepted.push_back(a.packet.id);
    }
    std::vector<std::uint64_t> departed;
    for (const auto& d : result.departures) departed.push_back(d.packet.id);
    CHECK(departed == accepted);
}

TEST_CASE("pq serves the highest nonempty class first") {
    PqQdisc q(500, kTosLevels);
    q.enqueue(mk(1, kTosBestEffort, 1500, SimTime::from_seconds(1)), SimTime::from_seconds(1));
    q.enqueue(mk(2, kTosVoice, 200, SimTime::from_seconds(2)), SimTime::from_seconds(2));
    auto first = q.dequeue(SimTime::from_seconds(3));
    REQUIRE(first.has_value());
    CHECK(first->id == 2); // voice before the earlier FTP packet
    CHECK(q.dequeue(SimTime::from_seconds(3))->id == 1);
}

TEST_CASE("pq keeps FIFO order within a class and shares one buffer budget") {
    PqQdisc q(3, kTosLevels);
    CHECK(q.enqueue(mk(1, 6, 200), {}) == EnqueueOutcome::Accepted);
    CHECK(q.enqueue(mk(2, 6, 200), {}) == EnqueueOutcome::Accepted);
    CHECK(q.enqueue(mk(3, 0, 200), {}) == EnqueueOutcome::Accepted);
    CHECK(q.enqueue(mk(4, 7, 200), {}) == EnqueueOutcome::Dropped); // full, tail drop
    CHECK(q.dequeue({})->id == 1);
    CHECK(q.dequeue({})->id == 2);
    CHECK(q.dequeue({})->id == 3);
}

TEST_CASE("pq dominance: nothing departs past a queued higher class") {
    PqQdisc q(64, kTosLevels);
    RandomStream rng(12, "pq-dom");
    std::vector<TimedPacket> arrivals;
    double t = 0.0;
    for (std::uint64_t i = 0; i < 300; ++i) {
        if (rng.uniform01() > 0.5) t += rng.exponential(0.002);
        const ClassId tos = static_cast<ClassId>(rng.next_u64() % kTosLevels);
        arrivals.push_back(TimedPacket{SimTime::from_seconds(t),
                                       mk(i, tos, 200 + rng.next_u64() % 1200,
                                          SimTime::from_seconds(t))});
    }
    auto result = drive_port(q, arrivals, 1'000'000);

    std::set<std::uint64_t> dropped;
    for (const auto& d : result.dropped) dropped.insert(d.id);
    std::multiset<ClassId> queued;
    std::size_t next = 0;
    for (const auto& dep : result.departures) {
        while (next < arrivals.size() && arrivals[next].t <= dep.start) {
            if (dropped.count(arrivals[next].packet.id) == 0) {
                queued.insert(arrivals[next].packet.tos);
            }
            ++next;
        }
        REQUIRE(!queued.empty());
        CHECK(*queued.rbegin() == dep.packet.tos); // a highest-class packet departs
        queued.erase(queued.find(dep.packet.tos));
    }
}

TEST_CASE("wfq finish tag rule") {
    CHECK(wfq_finish_tag(0.0, 0.0, 1000, 2.0) == doctest::Approx(500.0));
    // reactivating flow: V has moved past the stale F_prev
    CHECK(wfq_finish_tag(300.0, 100.0, 100, 1.0) == doctest::Approx(400.0));
    // backlogged flow: F_prev ahead of V wins the max
    CHECK(wfq_finish_tag(300.0, 900.0, 100, 1.0) == doctest::Approx(1000.0));
}

TEST_CASE("wfq stamps tags through the flow state") {
    QdiscConfig config;
    config.kind = QdiscKind::Wfq;
    config.wfq_weights[2] = 2.0;
    WfqQdisc q(500, 1'000'000, config);
    const FlowKey flow{0, 1, 2};
    CHECK(q.finish_time(flow, 1000) == doctest::Approx(500.0));
    CHECK(q.finish_time(flow, 1000) == doctest::Approx(1000.0)); // F_prev carried
}

TEST_CASE("wfq shared buffer refuses any class once full") {
    QdiscConfig config;
    config.kind = QdiscKind::Wfq;
    WfqQdisc q(4, 1'000'000, config);
    CHECK(q.enqueue(mk(1, 0, 500, {}, 0, 10), {}) == EnqueueOutcome::Accepted);
    CHECK(q.enqueue(mk(2, 0, 500, {}, 0, 10), {}) == EnqueueOutcome::Accepted);
    CHECK(q.enqueue(mk(3, 1, 500, {}, 1, 11), {}) == EnqueueOutcome::Accepted);
    CHECK(q.enqueue(mk(4, 1, 500, {}, 1, 11), {}) == EnqueueOutcome::Accepted);
    // third flow arrives to a full shared buffer; its class does not matter
    CHECK(q.enqueue(mk(5, 6, 200, {}, 2, 12), {}) == EnqueueOutcome::Dropped);
    CHECK(q.occupancy() == 4);
}

TEST_CASE("wfq equal weights and sizes alternate between flows, lower key on ties") {
    QdiscConfig config;
    config.kind = QdiscKind::Wfq;
    config.wfq_weights[1] = 1.0;
    config.wfq_weights[2] = 1.0;
    WfqQdisc q(500, 1'000'000, config);
    for (std::uint64_t i = 0; i < 6; ++i) {
        q.enqueue(mk(10 + i, 1, 500, {}, 0, 10), {}); // flow A
        q.enqueue(mk(20 + i, 2, 500, {}, 1, 11), {}); // flow B
    }
    std::vector<std::uint64_t> order;
    while (auto p = q.dequeue({})) order.push_back(p->id);
    CHECK(order == std::vector<std::uint64_t>{10, 20, 11, 21, 12, 22, 13, 23, 14, 24, 15, 25});
}

TEST_CASE("work conservation: a backlogged qdisc always hands out a packet") {
    QdiscConfig wfq_config;
    wfq_config.kind = QdiscKind::Wfq;
    FifoQdisc fifo(32);
    PqQdisc pq(32, kTosLevels);
    WfqQdisc wfq(32, 1'000'000, wfq_config);
    RandomStream rng(13, "work-conservation");
    for (Qdisc* q : std::initializer_list<Qdisc*>{&fifo, &pq, &wfq}) {
        double t = 0.0;
        std::uint64_t id = 0;
        for (int round = 0; round < 200; ++round) {
            t += rng.exponential(0.001);
            const int burst = 1 + static_cast<int>(rng.next_u64() % 4);
            for (int i = 0; i < burst; ++i) {
                q->enqueue(mk(id++, static_cast<ClassId>(rng.next_u64() % 8),
                              100 + rng.next_u64() % 1000),
                           SimTime::from_seconds(t));
            }
            if (rng.uniform01() < 0.7) {
                const std::size_t before = q->occupancy();
                if (before > 0) {
                    CHECK(q->dequeue(SimTime::from_seconds(t)).has_value());
                    CHECK(q->occupancy() == before - 1);
                }
            }
        }
        while (q->occupancy() > 0) {
            t += 0.001;
            CHECK(q->dequeue(SimTime::from_seconds(t)).has_value());
        }
        CHECK_FALSE(q->dequeue(SimTime::from_seconds(t)).has_value());
    }
}

TEST_CASE("port conservation: offered = accepted + dropped, accepted = departed + queued") {
    QdiscConfig config;
    config.kind = QdiscKind::Wfq;
    for (int kind = 0; kind < 3; ++kind) {
        std::unique_ptr<Qdisc> q;
        if (kind == 0) q = std::make_unique<FifoQdisc>(16);
        if (kind == 1) q = std::make_unique<PqQdisc>(16, kTosLevels);
        if (kind == 2) q = std::make_unique<WfqQdisc>(16, 200'000, config);

        RandomStream rng(14 + kind, "port-conservation");
        std::vector<TimedPacket> arrivals;
        double t = 0.0;
        for (std::uint64_t i = 0; i < 400; ++i) {
            if (rng.uniform01() > 0.5) t += rng.exponential(0.001);
            arrivals.push_back(TimedPacket{SimTime::from_seconds(t),
                                           mk(i, static_cast<ClassId>(rng.next_u64() % 8),
                                              200 + rng.next_u64() % 1300,
                                              SimTime::from_seconds(t))});
        }
        auto result = drive_port(*q, arrivals, 200'000);
        CHECK(result.departures.size() + result.dropped.size() == arrivals.size());
        CHECK(q->occupancy() == 0); // drive_port drains fully
    }
}

TEST_CASE("single class reduces every discipline to fifo") {
    RandomStream rng(15, "single-class");
    for (int trial = 0; trial < 20; ++trial) {
        auto arrivals = random_single_class_trace(rng, 120);

        FifoQdisc fifo(40);
        PqQdisc pq(40, kTosLevels);
        QdiscConfig config;
        config.kind = QdiscKind::Wfq;
        WfqQdisc wfq(40, 1'000'000, config);

        auto base = drive_port(fifo, arrivals, 1'000'000);
        for (Qdisc* q : std::initializer_list<Qdisc*>{&pq, &wfq}) {
            auto other = drive_port(*q, arrivals, 1'000'000);
            REQUIRE(other.departures.size() == base.departures.size());
            for (std::size_t i = 0; i < base.departures.size(); ++i) {
                CHECK(other.departures[i].packet.id == base.departures[i].packet.id);
                CHECK(other.departures[i].finish == base.departures[i].finish);
            }
        }
    }
}

TEST_CASE("wfq tracks the fluid GPS oracle on random small traces") {
    RandomStream rng(16, "wfq-oracle-unit");
    for (int trial = 0; trial < 100; ++trial) {
        auto trace = testsupport::make_random_trace(rng);
        std::string failure;
        const bool ok = testsupport::wfq_tracks_fluid_gps(trace, &failure);
        CHECK_MESSAGE(ok, "trial ", trial, ": ", failure);
    }
}

TEST_CASE("config parses kinds and defaults weights to the ToS value, floor 1") {
    CHECK(qdisc_kind_from_string("fifo") == QdiscKind::Fifo);
    CHECK(qdisc_kind_from_string("pq") == QdiscKind::Pq);
    CHECK(qdisc_kind_from_string("wfq") == QdiscKind::Wfq);
    CHECK_FALSE(qdisc_kind_from_string("red").has_value());

    QdiscConfig config;
    CHECK(config.weight_for(0) == 1.0);
    CHECK(config.weight_for(6) == 6.0);
    config.wfq_weights[6] = 2.5;
    CHECK(config.weight_for(6) == 2.5);
}
