#ifndef STEPSIM_METRICS_HPP
#define STEPSIM_METRICS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stepsim/packet.hpp"
#include "stepsim/rng.hpp"
#include "stepsim/time.hpp"
#include "stepsim/traffic.hpp"

namespace stepsim {

enum class DropReason : std::uint8_t { BufferFull, BitError };

std::string to_string(DropReason r);

/// Returns delivered_at - created_at; throws NegativeDelay on a reversed
/// pair (clock bug upstream).
SimTime e2e_delay(const DeliveryRecord& rec);

/// RFC 3550 interarrival jitter: J += (|D| - J)/16 over successive transit
/// differences. The first sample only seeds last_transit.
struct JitterState {
    double jitter_s = 0.0;
    double last_transit_s = 0.0;
    bool initialized = false;

    double update(double transit_s);
};

/// Per-bucket event counts over [0, end), buckets [k*width, (k+1)*width).
/// An event exactly at `end` lands in the last bucket.
std::vector<std::uint64_t> bucket_counts(const std::vector<std::int64_t>& times_ns,
                                         SimTime width, SimTime end);

std::size_t bucket_count_for(SimTime width, SimTime end);

/// Counters and raw event logs for one run. Totals and means are exact;
/// per-sample delay retention is reservoir-capped (default 2^22 per ToS) so
/// p95 and per-bucket delay stay memory-bounded on very long runs.
class MetricsStore {
public:
    struct TosCounters {
        std::uint64_t sent_packets = 0;
        std::uint64_t sent_bytes = 0;
        std::uint64_t received_packets = 0;
        std::uint64_t received_bytes = 0;
        std::uint64_t dropped_buffer_full = 0;
        std::uint64_t dropped_bit_error = 0;
        std::int64_t in_flight = 0;
    };

    explicit MetricsStore(SimTime bucket_width,
                          std::size_t reservoir_cap = std::size_t{1} << 22,
                          std::uint64_t reservoir_seed = 0);

    void record_sent(SimTime t, ClassId tos, std::uint32_t bytes);
    void record_drop(SimTime t, ClassId tos, DropReason reason);
    void record_delivery(const DeliveryRecord& rec);

    SimTime bucket_width() const { return bucket_width_; }

    const TosCounters& counters(ClassId tos) const;
    std::vector<ClassId> active_tos() const;

    /// received bytes in [start, end) * 8 / window seconds.
    double throughput_bps(ClassId tos, SimTime start, SimTime end) const;

    /// sent = received + dropped(BufferFull) + dropped(BitError) + in_flight,
    /// per ToS, with in_flight never negative.
    bool conservation_ok() const;

    std::vector<std::uint64_t> sent_series(ClassId tos, SimTime end) const;
    std::vector<std::uint64_t> received_series(ClassId tos, SimTime end) const;
    std::vector<std::uint64_t> drop_series(ClassId tos, SimTime end) const;

    double mean_delay_s(ClassId tos) const;
    std::optional<SimTime> min_delay(ClassId tos) const;

    struct DelaySample {
        std::int64_t t_ns;
        std::int64_t delay_ns;
    };

    const std::map<FlowKey, JitterState>& jitter() const { return jitter_; }

    struct PerTos {
        TosCounters counters;
        std::vector<std::int64_t> sent_times;
        std::vector<std::uint32_t> sent_bytes_log;
        std::vector<std::int64_t> received_times;
        std::vector<std::uint32_t> received_bytes_log;
        std::vector<std::int64_t> drop_times_buffer;
        std::vector<std::int64_t> drop_times_error;
        std::vector<DelaySample> delay_samples; // reservoir-capped
        std::uint64_t delay_seen = 0;
        double delay_sum_s = 0.0;
        double delay_sumsq_s = 0.0;
        std::int64_t delay_min_ns = 0;
        std::int64_t delay_max_ns = 0;
    };

    const std::map<ClassId, PerTos>& per_tos() const { return per_tos_; }

private:
    PerTos& slot(ClassId tos) { return per_tos_[tos]; }

    SimTime bucket_width_;
    std::size_t reservoir_cap_;
    RandomStream reservoir_rng_;
    std::map<ClassId, PerTos> per_tos_;
    std::map<FlowKey, JitterState> jitter_;
};

struct RunMeta {
    std::string qdisc;
    std::uint64_t seed = 0;
    SimTime duration;
    SimTime bucket_width;
};

/// `bucket_start_s,metric,tos,value` rows sorted by (metric, tos, bucket).
/// Count metrics cover every bucket; mean_delay_s rows appear only where a
/// bucket has samples.
std::string series_csv(const MetricsStore& store, SimTime duration);

nlohmann::ordered_json summary_json(const MetricsStore& store, const RunMeta& meta);

/// Writes series.csv and summary.json under dir; throws IoFailure when the
/// path can't be written. Byte-identical for identical runs.
void export_metrics(const MetricsStore& store, const RunMeta& meta,
                    const std::filesystem::path& dir);

} // namespace stepsim

#endif
