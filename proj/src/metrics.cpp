#include "stepsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "stepsim/detail/format.hpp"
#include "stepsim/error.hpp"

namespace stepsim {

std::string to_string(DropReason r) {
    return r == DropReason::BufferFull ? "BufferFull" : "BitError";
}

SimTime e2e_delay(const DeliveryRecord& rec) {
    if (rec.delivered_at < rec.created_at) {
        throw NegativeDelay("packet " + std::to_string(rec.packet_id) + " delivered at " +
                            std::to_string(rec.delivered_at.ns) + "ns before creation at " +
                            std::to_string(rec.created_at.ns) + "ns");
    }
    return rec.delivered_at - rec.created_at;
}

double JitterState::update(double transit_s) {
    if (!initialized) {
        initialized = true;
        last_transit_s = transit_s;
        jitter_s = 0.0;
        return jitter_s;
    }
    const double d = transit_s - last_transit_s;
    last_transit_s = transit_s;
    jitter_s += (std::abs(d) - jitter_s) / 16.0;
    return jitter_s;
}

std::size_t bucket_count_for(SimTime width, SimTime end) {
    if (width.ns <= 0 || end.ns <= 0) return 0;
    return static_cast<std::size_t>((end.ns + width.ns - 1) / width.ns);
}

std::vector<std::uint64_t> bucket_counts(const std::vector<std::int64_t>& times_ns,
                                         SimTime width, SimTime end) {
    std::vector<std::uint64_t> buckets(bucket_count_for(width, end), 0);
    if (buckets.empty()) return buckets;
    for (std::int64_t t : times_ns) {
        auto k = static_cast<std::size_t>(t / width.ns);
        if (k >= buckets.size()) k = buckets.size() - 1;
        buckets[k]++;
    }
    return buckets;
}

MetricsStore::MetricsStore(SimTime bucket_width, std::size_t reservoir_cap,
                           std::uint64_t reservoir_seed)
    : bucket_width_(bucket_width),
      reservoir_cap_(reservoir_cap),
      reservoir_rng_(reservoir_seed, "metrics-reservoir") {}

void MetricsStore::record_sent(SimTime t, ClassId tos, std::uint32_t bytes) {
    auto& s = slot(tos);
    s.counters.sent_packets++;
    s.counters.sent_bytes += bytes;
    s.counters.in_flight++;
    s.sent_times.push_back(t.ns);
    s.sent_bytes_log.push_back(bytes);
}

void MetricsStore::record_drop(SimTime t, ClassId tos, DropReason reason) {
    auto& s = slot(tos);
    s.counters.in_flight--;
    if (reason == DropReason::BufferFull) {
        s.counters.dropped_buffer_full++;
        s.drop_times_buffer.push_back(t.ns);
    } else {
        s.counters.dropped_bit_error++;
        s.drop_times_error.push_back(t.ns);
    }
}

void MetricsStore::record_delivery(const DeliveryRecord& rec) {
    const SimTime delay = e2e_delay(rec);
    auto& s = slot(rec.tos);
    s.counters.received_packets++;
    s.counters.received_bytes += rec.size_bytes;
    s.counters.in_flight--;
    s.received_times.push_back(rec.delivered_at.ns);
    s.received_bytes_log.push_back(rec.size_bytes);

    const double delay_s = delay.seconds();
    if (s.delay_seen == 0) {
        s.delay_min_ns = delay.ns;
        s.delay_max_ns = delay.ns;
    } else {
        s.delay_min_ns = std::min(s.delay_min_ns, delay.ns);
        s.delay_max_ns = std::max(s.delay_max_ns, delay.ns);
    }
    s.delay_seen++;
    s.delay_sum_s += delay_s;
    s.delay_sumsq_s += delay_s * delay_s;
    if (s.delay_samples.size() < reservoir_cap_) {
        s.delay_samples.push_back({rec.delivered_at.ns, delay.ns});
    } else {
        // Algorithm R: keep each of the n samples with probability cap/n.
        const std::uint64_t j = reservoir_rng_.next_u64() % s.delay_seen;
        if (j < reservoir_cap_) {
            s.delay_samples[static_cast<std::size_t>(j)] = {rec.delivered_at.ns, delay.ns};
        }
    }

    jitter_[FlowKey{rec.src, rec.dst, rec.tos}].update(delay_s);
}

const MetricsStore::TosCounters& MetricsStore::counters(ClassId tos) const {
    static const TosCounters kEmpty{};
    auto it = per_tos_.find(tos);
    return it == per_tos_.end() ? kEmpty : it->second.counters;
}

std::vector<ClassId> MetricsStore::active_tos() const {
    std::vector<ClassId> out;
    for (const auto& [tos, s] : per_tos_) {
        if (s.counters.sent_packets > 0 || s.counters.received_packets > 0) out.push_back(tos);
    }
    return out;
}

double MetricsStore::throughput_bps(ClassId tos, SimTime start, SimTime end) const {
    if (end <= start) return 0.0;
    auto it = per_tos_.find(tos);
    if (it == per_tos_.end()) return 0.0;
    const auto& s = it->second;
    std::uint64_t bytes = 0;
    for (std::size_t i = 0; i < s.received_times.size(); ++i) {
        if (s.received_times[i] >= start.ns && s.received_times[i] < end.ns) {
            bytes += s.received_bytes_log[i];
        }
    }
    return static_cast<double>(bytes) * 8.0 / (end - start).seconds();
}

bool MetricsStore::conservation_ok() const {
    for (const auto& [tos, s] : per_tos_) {
        const auto& c = s.counters;
        if (c.in_flight < 0) return false;
        if (c.sent_packets != c.received_packets + c.dropped_buffer_full +
                                  c.dropped_bit_error + static_cast<std::uint64_t>(c.in_flight)) {
            return false;
        }
    }
    return true;
}

std::vector<std::uint64_t> MetricsStore::sent_series(ClassId tos, SimTime end) const {
    auto it = per_tos_.find(tos);
    static const std::vector<std::int64_t> kNone;
    return bucket_counts(it == per_tos_.end() ? kNone : it->second.sent_times, bucket_width_, end);
}

std::vector<std::uint64_t> MetricsStore::received_series(ClassId tos, SimTime end) const {
    auto it = per_tos_.find(tos);
    static const std::vector<std::int64_t> kNone;
    return bucket_counts(it == per_tos_.end() ? kNone : it->second.received_times, bucket_width_,
                         end);
}

std::vector<std::uint64_t> MetricsStore::drop_series(ClassId tos, SimTime end) const {
    auto it = per_tos_.find(tos);
    if (it == per_tos_.end()) return bucket_counts({}, bucket_width_, end);
    return bucket_counts(it->second.drop_times_buffer, bucket_width_, end);
}

double MetricsStore::mean_delay_s(ClassId tos) const {
    auto it = per_tos_.find(tos);
    if (it == per_tos_.end() || it->second.delay_seen == 0) return 0.0;
    return it->second.delay_sum_s / static_cast<double>(it->second.delay_seen);
}

std::optional<SimTime> MetricsStore::min_delay(ClassId tos) const {
    auto it = per_tos_.find(tos);
    if (it == per_tos_.end() || it->second.delay_seen == 0) return std::nullopt;
    return SimTime::from_ns(it->second.delay_min_ns);
}

namespace {

struct SeriesWriter {
    std::string& out;
    SimTime width;

    void counts(const std::string& metric, ClassId tos,
                const std::vector<std::uint64_t>& buckets) {
        for (std::size_t k = 0; k < buckets.size(); ++k) {
            row(k, metric, tos, std::to_string(buckets[k]));
        }
    }

    void row(std::size_t k, const std::string& metric, ClassId tos, const std::string& value) {
        out += detail::format_double(static_cast<double>(k) * width.seconds());
        out += ',';
        out += metric;
        out += ',';
        out += std::to_string(tos);
        out += ',';
        out += value;
        out += '\n';
    }
};

} // namespace

std::string series_csv(const MetricsStore& store, SimTime duration) {
    const SimTime width = store.bucket_width();
    const std::size_t nbuckets = bucket_count_for(width, duration);
    std::string out = "bucket_start_s,metric,tos,value\n";
    SeriesWriter w{out, width};

    const auto tos_list = store.active_tos();
    // Metrics in lexicographic order; tos ascending inside each.
    for (ClassId tos : tos_list) w.counts("dropped_packets", tos, store.drop_series(tos, duration));
    for (ClassId tos : tos_list) {
        const auto it = store.per_tos().find(tos);
        w.counts("errored_packets", tos,
                 bucket_counts(it->second.drop_times_error, width, duration));
    }
    for (ClassId tos : tos_list) {
        const auto& s = store.per_tos().find(tos)->second;
        std::vector<double> sums(nbuckets, 0.0);
        std::vector<std::uint64_t> counts(nbuckets, 0);
        for (const auto& d : s.delay_samples) {
            auto k = static_cast<std::size_t>(d.t_ns / width.ns);
            if (k >= nbuckets) k = nbuckets - 1;
            sums[k] += static_cast<double>(d.delay_ns) * 1e-9;
            counts[k]++;
        }
        for (std::size_t k = 0; k < nbuckets; ++k) {
            if (counts[k] == 0) continue; // absent mean
            w.row(k, "mean_delay_s", tos, detail::format_double(sums[k] / static_cast<double>(counts[k])));
        }
    }
    for (ClassId tos : tos_list) {
        w.counts("received_packets", tos, store.received_series(tos, duration));
    }
    for (ClassId tos : tos_list) w.counts("sent_packets", tos, store.sent_series(tos, duration));
    for (ClassId tos : tos_list) {
        for (std::size_t k = 0; k < nbuckets; ++k) {
            const SimTime b0 = SimTime::from_ns(static_cast<std::int64_t>(k) * width.ns);
            const SimTime b1 = b0 + width;
            w.row(k, "throughput_bps", tos, detail::format_double(store.throughput_bps(tos, b0, b1)));
        }
    }
    return out;
}

namespace {

double p95_of(std::vector<std::int64_t> delays_ns) {
    if (delays_ns.empty()) return 0.0;
    std::sort(delays_ns.begin(), delays_ns.end());
    // Nearest-rank: smallest sample with at least 95% of mass at or below.
    const auto n = delays_ns.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    if (rank == 0) rank = 1;
    return static_cast<double>(delays_ns[rank - 1]) * 1e-9;
}

} // namespace

nlohmann::ordered_json summary_json(const MetricsStore& store, const RunMeta& meta) {
    nlohmann::ordered_json j;
    j["run"] = {{"qdisc", meta.qdisc},
                {"seed", meta.seed},
                {"duration_s", meta.duration.seconds()},
                {"bucket_width_s", meta.bucket_width.seconds()}};

    nlohmann::ordered_json per_tos = nlohmann::ordered_json::object();
    for (const auto& [tos, s] : store.per_tos()) {
        const auto& c = s.counters;
        nlohmann::ordered_json t;
        t["sent_packets"] = c.sent_packets;
        t["sent_bytes"] = c.sent_bytes;
        t["received_packets"] = c.received_packets;
        t["received_bytes"] = c.received_bytes;
        t["dropped_buffer_full"] = c.dropped_buffer_full;
        t["dropped_bit_error"] = c.dropped_bit_error;
        t["in_flight"] = c.in_flight;
        t["error_rate"] = c.sent_packets == 0
                              ? 0.0
                              : static_cast<double>(c.dropped_bit_error) /
                                    static_cast<double>(c.sent_packets);
        t["throughput_bps"] = store.throughput_bps(tos, SimTime::zero(), meta.duration);

        nlohmann::ordered_json delay;
        delay["samples"] = s.delay_seen;
        if (s.delay_seen > 0) {
            const double n = static_cast<double>(s.delay_seen);
            const double mean = s.delay_sum_s / n;
            delay["mean_s"] = mean;
            delay["min_s"] = static_cast<double>(s.delay_min_ns) * 1e-9;
            delay["max_s"] = static_cast<double>(s.delay_max_ns) * 1e-9;
            std::vector<std::int64_t> retained;
            retained.reserve(s.delay_samples.size());
            for (const auto& d : s.delay_samples) retained.push_back(d.delay_ns);
            delay["p95_s"] = p95_of(std::move(retained));
            const double var = std::max(0.0, s.delay_sumsq_s / n - mean * mean);
            delay["stddev_s"] = std::sqrt(var);
        }
        t["delay"] = delay;

        double jitter_sum = 0.0;
        double jitter_max = 0.0;
        std::uint64_t flows = 0;
        for (const auto& [key, js] : store.jitter()) {
            if (key.tos != tos) continue;
            flows++;
            jitter_sum += js.jitter_s;
            jitter_max = std::max(jitter_max, js.jitter_s);
        }
        nlohmann::ordered_json jit;
        jit["flows"] = flows;
        jit["mean_s"] = flows == 0 ? 0.0 : jitter_sum / static_cast<double>(flows);
        jit["max_s"] = jitter_max;
        t["jitter"] = jit;

        per_tos[std::to_string(tos)] = t;
    }
    j["per_tos"] = per_tos;
    j["conservation_ok"] = store.conservation_ok();
    return j;
}

void export_metrics(const MetricsStore& store, const RunMeta& meta,
                    const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());

    auto write = [&](const char* name, const std::string& content) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw IoFailure("cannot open " + (dir / name).string());
        f << content;
        if (!f) throw IoFailure("write failed for " + (dir / name).string());
    };
    write("series.csv", series_csv(store, meta.duration));
    write("summary.json", summary_json(store, meta).dump(2) + "\n");
}

} // namespace stepsim
