#ifndef STEPSIM_QDISC_HPP
#define STEPSIM_QDISC_HPP

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "stepsim/packet.hpp"
#include "stepsim/time.hpp"

namespace stepsim {

enum class QdiscKind : std::uint8_t { Fifo, Pq, Wfq };

std::string to_string(QdiscKind k);
std::optional<QdiscKind> qdisc_kind_from_string(const std::string& s);

struct QdiscConfig {
    QdiscKind kind = QdiscKind::Fifo;
    std::uint32_t buffer_capacity_packets = 500;
    // Flow weight by ToS. Unlisted classes default to max(tos, 1).
    std::map<ClassId, double> wfq_weights;
    std::uint8_t pq_levels = kTosLevels;

    double weight_for(ClassId tos) const;
};

enum class EnqueueOutcome : std::uint8_t { Accepted, Dropped };

/// The packet-by-packet GPS tag rule: max(V_now, F_prev) + L/w.
double wfq_finish_tag(double v_now, double f_prev, std::uint64_t size_bits, double weight);

/// Egress-port scheduler contract. Tail drop only: an arrival meeting a full
/// buffer is refused, queued packets are never pushed out. A packet handed
/// out by dequeue() is in service and no longer occupies a buffer slot.
class Qdisc {
public:
    explicit Qdisc(std::uint32_t capacity) : capacity_(capacity) {}
    virtual ~Qdisc() = default;

    virtual EnqueueOutcome enqueue(const Packet& p, SimTime now) = 0;
    virtual std::optional<Packet> dequeue(SimTime now) = 0;
    virtual std::size_t occupancy() const = 0;

    std::uint32_t capacity() const { return capacity_; }
    bool empty() const { return occupancy() == 0; }

protected:
    std::uint32_t capacity_;
};

/// Single queue, departures in arrival order.
class FifoQdisc final : public Qdisc {
public:
    explicit FifoQdisc(std::uint32_t capacity) : Qdisc(capacity) {}

    EnqueueOutcome enqueue(const Packet& p, SimTime now) override;
    std::optional<Packet> dequeue(SimTime now) override;
    std::size_t occupancy() const override { return queue_.size(); }

private:
    std::deque<Packet> queue_;
};

/// Strict priority: one FIFO per ToS level, highest nonempty level served
/// first. Levels share one buffer budget; a full buffer refuses any class.
class PqQdisc final : public Qdisc {
public:
    PqQdisc(std::uint32_t capacity, std::uint8_t levels)
        : Qdisc(capacity), levels_(levels == 0 ? 1 : levels) {}

    EnqueueOutcome enqueue(const Packet& p, SimTime now) override;
    std::optional<Packet> dequeue(SimTime now) override;
    std::size_t occupancy() const override { return occupancy_; }

private:
    std::uint8_t level_for(ClassId tos) const {
        return tos < levels_ ? tos : static_cast<std::uint8_t>(levels_ - 1);
    }

    std::uint8_t levels_;
    std::array<std::deque<Packet>, kTosLevels> queues_;
    std::size_t occupancy_ = 0;
};

/// Packet-by-packet GPS approximation. Each accepted packet is stamped with
/// a virtual finish tag F = max(V, F_prev) + L/w; dequeue serves the queued
/// head-of-flow packet with the smallest tag, ties to the lower flow key.
///
/// The system virtual time V advances once per arrival/departure epoch by
/// elapsed * line_rate / (sum of weights of flows with F_prev > V), with no
/// iterated deletion inside an epoch. All flows share one buffer budget.
class WfqQdisc final : public Qdisc {
public:
    WfqQdisc(std::uint32_t capacity, std::uint64_t line_rate_bps, QdiscConfig config)
        : Qdisc(capacity), line_rate_bps_(line_rate_bps), config_(std::move(config)) {}

    EnqueueOutcome enqueue(const Packet& p, SimTime now) override;
    std::optional<Packet> dequeue(SimTime now) override;
    std::size_t occupancy() const override { return occupancy_; }

    /// Tag rule, exposed for direct checks: returns max(V_now, F_prev) + L/w
    /// and advances the flow's F_prev to it.
    double finish_time(const FlowKey& flow, std::uint64_t size_bits);

    double virtual_time() const { return virtual_time_; }

private:
    struct Tagged {
        Packet packet;
        double finish_tag;
    };
    struct FlowState {
        std::deque<Tagged> queue;
        double last_finish = 0.0; // F_prev: largest tag handed to this flow
    };

    void advance_virtual_time(SimTime now);

    std::uint64_t line_rate_bps_;
    QdiscConfig config_;
    std::map<FlowKey, FlowState> flows_; // ordered: scan order breaks tag ties
    std::size_t occupancy_ = 0;
    double virtual_time_ = 0.0;
    SimTime last_epoch_;
};

/// line_rate_bps feeds WFQ's virtual clock; FIFO and PQ ignore it.
std::unique_ptr<Qdisc> make_qdisc(const QdiscConfig& config, std::uint64_t line_rate_bps);

} // namespace stepsim

#endif
