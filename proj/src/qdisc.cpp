#include "stepsim/qdisc.hpp"

#include <algorithm>

namespace stepsim {

std::string to_string(QdiscKind k) {
    switch (k) {
    case QdiscKind::Fifo: return "fifo";
    case QdiscKind::Pq: return "pq";
    case QdiscKind::Wfq: return "wfq";
    }
    return "?";
}

std::optional<QdiscKind> qdisc_kind_from_string(const std::string& s) {
    if (s == "fifo") return QdiscKind::Fifo;
    if (s == "pq") return QdiscKind::Pq;
    if (s == "wfq") return QdiscKind::Wfq;
    return std::nullopt;
}

std::string to_string(const FlowKey& f) {
    return std::to_string(f.src) + ">" + std::to_string(f.dst) + "@" + std::to_string(f.tos);
}

double QdiscConfig::weight_for(ClassId tos) const {
    auto it = wfq_weights.find(tos);
    if (it != wfq_weights.end()) return it->second;
    return tos > 0 ? static_cast<double>(tos) : 1.0; // weight = ToS, floor 1
}

// ---------------------------------------------------------------- FIFO

EnqueueOutcome FifoQdisc::enqueue(const Packet& p, SimTime) {
    classify(p);
    if (queue_.size() >= capacity_) return EnqueueOutcome::Dropped;
    queue_.push_back(p);
    return EnqueueOutcome::Accepted;
}

std::optional<Packet> FifoQdisc::dequeue(SimTime) {
    if (queue_.empty()) return std::nullopt;
    Packet p = queue_.front();
    queue_.pop_front();
    return p;
}

// ------------------------------------------------------------------ PQ

EnqueueOutcome PqQdisc::enqueue(const Packet& p, SimTime) {
    const ClassId tos = classify(p);
    if (occupancy_ >= capacity_) return EnqueueOutcome::Dropped;
    queues_[level_for(tos)].push_back(p);
    ++occupancy_;
    return EnqueueOutcome::Accepted;
}

std::optional<Packet> PqQdisc::dequeue(SimTime) {
    for (int level = levels_ - 1; level >= 0; --level) {
        auto& q = queues_[static_cast<std::size_t>(level)];
        if (q.empty()) continue;
        Packet p = q.front();
        q.pop_front();
        --occupancy_;
        return p;
    }
    return std::nullopt;
}

// ----------------------------------------------------------------- WFQ

double wfq_finish_tag(double v_now, double f_prev, std::uint64_t size_bits, double weight) {
    return std::max(v_now, f_prev) + static_cast<double>(size_bits) / weight;
}

void WfqQdisc::advance_virtual_time(SimTime now) {
    const SimTime dt = now - last_epoch_;
    last_epoch_ = now;
    if (dt.ns <= 0) return;
    // GPS-active flows: tagged work not yet finished in virtual time.
    double active_weight = 0.0;
    for (const auto& [key, fs] : flows_) {
        if (fs.last_finish > virtual_time_) active_weight += config_.weight_for(key.tos);
    }
    if (active_weight > 0.0) {
        virtual_time_ += dt.seconds() * static_cast<double>(line_rate_bps_) / active_weight;
    }
}

double WfqQdisc::finish_time(const FlowKey& flow, std::uint64_t size_bits) {
    auto& fs = flows_[flow];
    const double tag = wfq_finish_tag(virtual_time_, fs.last_finish, size_bits,
                                      config_.weight_for(flow.tos));
    fs.last_finish = tag;
    return tag;
}

EnqueueOutcome WfqQdisc::enqueue(const Packet& p, SimTime now) {
    classify(p);
    advance_virtual_time(now);
    if (occupancy_ >= capacity_) return EnqueueOutcome::Dropped; // shared budget
    const double tag = finish_time(p.flow(), p.size_bits());
    flows_[p.flow()].queue.push_back(Tagged{p, tag});
    ++occupancy_;
    return EnqueueOutcome::Accepted;
}

std::optional<Packet> WfqQdisc::dequeue(SimTime now) {
    advance_virtual_time(now);
    if (occupancy_ == 0) return std::nullopt;
    FlowState* best = nullptr;
    double best_tag = 0.0;
    for (auto& [key, fs] : flows_) {
        if (fs.queue.empty()) continue;
        const double tag = fs.queue.front().finish_tag;
        if (best == nullptr || tag < best_tag) { // strict: ties keep lower key
            best = &fs;
            best_tag = tag;
        }
    }
    Packet p = best->queue.front().packet;
    best->queue.pop_front();
    --occupancy_;
    return p;
}

std::unique_ptr<Qdisc> make_qdisc(const QdiscConfig& config, std::uint64_t line_rate_bps) {
    switch (config.kind) {
    case QdiscKind::Fifo: return std::make_unique<FifoQdisc>(config.buffer_capacity_packets);
    case QdiscKind::Pq:
        return std::make_unique<PqQdisc>(config.buffer_capacity_packets, config.pq_levels);
    case QdiscKind::Wfq:
        return std::make_unique<WfqQdisc>(config.buffer_capacity_packets, line_rate_bps, config);
    }
    return nullptr;
}

} // namespace stepsim
