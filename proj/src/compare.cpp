#include "stepsim/compare.hpp"

#include <fstream>

#include "stepsim/detail/format.hpp"
#include "stepsim/error.hpp"

namespace stepsim {

namespace {

ComparisonReport::RunSummary summarize(const RunResult& result, SimTime duration) {
    const auto& c = result.metrics.counters(kTosVoice);
    ComparisonReport::RunSummary s;
    s.qdisc = result.meta.qdisc;
    s.voice_sent = c.sent_packets;
    s.voice_received = c.received_packets;
    s.voice_dropped = c.dropped_buffer_full + c.dropped_bit_error;
    s.voice_mean_delay_s = result.metrics.mean_delay_s(kTosVoice);
    s.voice_sent_series = result.metrics.sent_series(kTosVoice, duration);
    return s;
}

std::string num(double v) { return detail::format_double(v); }

} // namespace

bool ComparisonReport::all_pass() const {
    return drops_ordering.pass && received_ordering.pass && delay_ordering.pass &&
           sent_equality.pass;
}

nlohmann::ordered_json ComparisonReport::to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    auto run_json = [](const RunSummary& r) {
        nlohmann::ordered_json o;
        o["qdisc"] = r.qdisc;
        o["voice_sent"] = r.voice_sent;
        o["voice_received"] = r.voice_received;
        o["voice_dropped"] = r.voice_dropped;
        o["voice_mean_delay_s"] = r.voice_mean_delay_s;
        return o;
    };
    j["runs"] = {run_json(fifo), run_json(pq), run_json(wfq)};
    auto verdict_json = [](const OrderingVerdict& v) {
        nlohmann::ordered_json o;
        o["pass"] = v.pass;
        o["strict"] = v.strict;
        o["detail"] = v.detail;
        return o;
    };
    j["verdicts"] = {{"drops_ordering", verdict_json(drops_ordering)},
                     {"received_ordering", verdict_json(received_ordering)},
                     {"delay_ordering", verdict_json(delay_ordering)},
                     {"sent_equality", verdict_json(sent_equality)}};
    j["all_pass"] = all_pass();
    return j;
}

std::string ComparisonReport::to_text() const {
    std::string out;
    auto pad = [](std::string s, std::size_t width) {
        s.append(s.size() < width ? width - s.size() : 1, ' ');
        return s;
    };
    out += "discipline  voice_sent  voice_received  voice_dropped  mean_delay_s\n";
    for (const RunSummary* r : {&fifo, &pq, &wfq}) {
        out += pad(r->qdisc, 12);
        out += pad(std::to_string(r->voice_sent), 12);
        out += pad(std::to_string(r->voice_received), 16);
        out += pad(std::to_string(r->voice_dropped), 15);
        out += num(r->voice_mean_delay_s);
        out += '\n';
    }
    for (const OrderingVerdict* v :
         {&drops_ordering, &received_ordering, &delay_ordering, &sent_equality}) {
        out += v->pass ? "PASS" : "FAIL";
        out += "  ";
        out += v->name;
        out += ": ";
        out += v->detail;
        out += '\n';
    }
    return out;
}

ComparisonReport compare_disciplines(const Scenario& base) {
    return compare_disciplines(base, std::nullopt, RunOptions{});
}

ComparisonReport compare_disciplines(const Scenario& base,
                                     const std::optional<std::filesystem::path>& out_dir,
                                     RunOptions options) {
    ComparisonReport report;
    report.seed = base.seed;

    for (QdiscKind kind : {QdiscKind::Fifo, QdiscKind::Pq, QdiscKind::Wfq}) {
        Scenario s = base;
        s.qdisc.kind = kind;
        RunResult result = out_dir.has_value()
                               ? run_scenario(s, *out_dir / to_string(kind), options)
                               : run_scenario(s);
        auto summary = summarize(result, s.duration);
        switch (kind) {
        case QdiscKind::Fifo: report.fifo = std::move(summary); break;
        case QdiscKind::Pq: report.pq = std::move(summary); break;
        case QdiscKind::Wfq: report.wfq = std::move(summary); break;
        }
    }

    const auto& f = report.fifo;
    const auto& p = report.pq;
    const auto& w = report.wfq;

    report.drops_ordering.name = "voice drops FIFO >= WFQ >= PQ";
    report.drops_ordering.pass = f.voice_dropped >= w.voice_dropped &&
                                 w.voice_dropped >= p.voice_dropped;
    report.drops_ordering.strict = f.voice_dropped > w.voice_dropped &&
                                   w.voice_dropped > p.voice_dropped;
    report.drops_ordering.detail = "fifo=" + std::to_string(f.voice_dropped) +
                                   " wfq=" + std::to_string(w.voice_dropped) +
                                   " pq=" + std::to_string(p.voice_dropped);

    report.received_ordering.name = "voice received PQ >= WFQ >= FIFO";
    report.received_ordering.pass = p.voice_received >= w.voice_received &&
                                    w.voice_received >= f.voice_received;
    report.received_ordering.strict = p.voice_received >= w.voice_received &&
                                      w.voice_received > f.voice_received;
    report.received_ordering.detail = "pq=" + std::to_string(p.voice_received) +
                                      " wfq=" + std::to_string(w.voice_received) +
                                      " fifo=" + std::to_string(f.voice_received);

    report.delay_ordering.name = "voice mean delay FIFO >= WFQ and FIFO >= PQ";
    report.delay_ordering.pass = f.voice_mean_delay_s >= w.voice_mean_delay_s &&
                                 f.voice_mean_delay_s >= p.voice_mean_delay_s;
    report.delay_ordering.strict = f.voice_mean_delay_s > w.voice_mean_delay_s &&
                                   w.voice_mean_delay_s >= p.voice_mean_delay_s;
    report.delay_ordering.detail = "fifo=" + num(f.voice_mean_delay_s) +
                                   " wfq=" + num(w.voice_mean_delay_s) +
                                   " pq=" + num(p.voice_mean_delay_s);

    report.sent_equality.name = "voice sent series identical";
    report.sent_equality.pass = f.voice_sent_series == p.voice_sent_series &&
                                f.voice_sent_series == w.voice_sent_series;
    report.sent_equality.strict = report.sent_equality.pass;
    report.sent_equality.detail = report.sent_equality.pass
                                      ? "identical across fifo/pq/wfq"
                                      : "series diverge across disciplines";

    if (out_dir.has_value()) {
        std::ofstream jf(*out_dir / "comparison.json", std::ios::binary);
        if (!jf) throw IoFailure("cannot write " + (*out_dir / "comparison.json").string());
        jf << report.to_json().dump(2) << "\n";
    }
    return report;
}

} // namespace stepsim
