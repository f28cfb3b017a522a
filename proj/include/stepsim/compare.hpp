#ifndef STEPSIM_COMPARE_HPP
#define STEPSIM_COMPARE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stepsim/scenario.hpp"
#include "stepsim/simulation.hpp"

namespace stepsim {

/// Pass admits ties; strict records whether the inequalities held strictly
/// where the orderings call for it.
struct OrderingVerdict {
    std::string name;
    bool pass = false;
    bool strict = false;
    std::string detail;
};

struct ComparisonReport {
    struct RunSummary {
        std::string qdisc;
        std::uint64_t voice_sent = 0;
        std::uint64_t voice_received = 0;
        std::uint64_t voice_dropped = 0;
        double voice_mean_delay_s = 0.0;
        std::vector<std::uint64_t> voice_sent_series;
    };

    std::uint64_t seed = 0;
    RunSummary fifo, pq, wfq;
    OrderingVerdict drops_ordering;    // FIFO >= WFQ >= PQ, strict when >
    OrderingVerdict received_ordering; // PQ >= WFQ >= FIFO, strict when WFQ > FIFO
    OrderingVerdict delay_ordering;    // FIFO >= WFQ and FIFO >= PQ, strict when FIFO > WFQ >= PQ
    OrderingVerdict sent_equality;     // per-bucket voice sent series identical

    bool all_pass() const;
    nlohmann::ordered_json to_json() const;
    std::string to_text() const;
};

/// Runs the scenario once per discipline with the same seed and sources,
/// then scores the orderings on voice (ToS 6) traffic. With out_dir set,
/// each run exports under <out_dir>/<qdisc>/ and the report is written to
/// <out_dir>/comparison.json.
ComparisonReport compare_disciplines(const Scenario& base);
ComparisonReport compare_disciplines(const Scenario& base,
                                     const std::optional<std::filesystem::path>& out_dir,
                                     RunOptions options);

} // namespace stepsim

#endif
