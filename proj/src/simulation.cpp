#include "stepsim/simulation.hpp"

#include <fstream>
#include <limits>
#include <utility>

#include "stepsim/error.hpp"

namespace stepsim {

namespace {

// Hosts model lossless NIC queues: the disciplines under study live at the
// router egress ports, and host-side behavior must stay identical across
// discipline runs.
constexpr std::uint32_t kHostQueueCapacity = std::numeric_limits<std::uint32_t>::max();

// Event.payload for SourceEmit distinguishes the source table.
constexpr std::uint32_t kVoipSource = 0;
constexpr std::uint32_t kFtpSource = 1;

} // namespace

Simulation::Simulation(const Scenario& scenario, RunOptions options)
    : scenario_(scenario),
      options_(options),
      topo_(build_step_topology(scenario.topology)),
      routes_(compute_routes(topo_)),
      engine_(scenario.seed),
      metrics_(scenario.bucket_width, std::size_t{1} << 22, scenario.seed) {
    scenario_.validate();
    engine_.record_trace(options_.trace);

    ports_.resize(topo_.links.size());
    link_noise_.resize(topo_.links.size());
    for (const Link& l : topo_.links) {
        Port& port = ports_[l.id];
        if (topo_.nodes[l.src].kind == NodeKind::Host) {
            QdiscConfig host_q;
            host_q.kind = QdiscKind::Fifo;
            host_q.buffer_capacity_packets = kHostQueueCapacity;
            port.qdisc = make_qdisc(host_q, l.rate_bps);
        } else {
            port.qdisc = make_qdisc(scenario_.qdisc, l.rate_bps);
        }
        if (l.ber > 0.0) {
            link_noise_[l.id] = engine_.rng_stream("link-noise-" + std::to_string(l.id));
        }
    }

    for (const auto& p : scenario_.voip_sources) {
        VoipSourceSpec spec;
        spec.src = topo_.find_node(p.src)->id;
        spec.dst = topo_.find_node(p.dst)->id;
        spec.frame_interval = p.frame_interval;
        spec.payload_bytes = p.payload_bytes;
        spec.header_bytes = p.header_bytes;
        spec.start = p.start;
        spec.stop = scenario_.stop_of(p);
        spec.tos = p.tos;
        voip_.emplace_back(spec);
    }
    for (std::size_t i = 0; i < scenario_.ftp_sources.size(); ++i) {
        const auto& p = scenario_.ftp_sources[i];
        FtpSourceSpec spec;
        spec.src = topo_.find_node(p.src)->id;
        spec.dst = topo_.find_node(p.dst)->id;
        spec.mean_interrequest_s = p.mean_interrequest_s;
        spec.file_size_bytes = p.file_bytes;
        spec.segment_payload_bytes = p.segment_payload_bytes;
        spec.header_bytes = p.header_bytes;
        spec.start = p.start;
        spec.stop = scenario_.stop_of(p);
        spec.tos = p.tos;
        ftp_.emplace_back(spec, engine_.rng_stream("ftp-arrivals-" + std::to_string(i)));
    }

    engine_.set_handler(EventKind::SourceEmit,
                        [this](Engine&, const Event& ev) { on_source_emit(ev); });
    engine_.set_handler(EventKind::PortDequeueReady,
                        [this](Engine&, const Event& ev) { on_port_ready(ev); });
    engine_.set_handler(EventKind::LinkDeliver,
                        [this](Engine&, const Event& ev) { on_link_deliver(ev); });

    if (options_.drop_log) drop_log_ = "time_ns,port_id,tos,flow_id,reason\n";
}

std::string Simulation::port_name(LinkId link) const {
    const Link& l = topo_.links[link];
    return topo_.nodes[l.src].name + "->" + topo_.nodes[l.dst].name;
}

void Simulation::log_drop(SimTime t, LinkId link, const Packet& p, DropReason reason) {
    metrics_.record_drop(t, p.tos, reason);
    if (!options_.drop_log) return;
    drop_log_ += std::to_string(t.ns);
    drop_log_ += ',';
    drop_log_ += port_name(link);
    drop_log_ += ',';
    drop_log_ += std::to_string(p.tos);
    drop_log_ += ',';
    drop_log_ += topo_.nodes[p.src].name + ">" + topo_.nodes[p.dst].name;
    drop_log_ += ',';
    drop_log_ += to_string(reason);
    drop_log_ += '\n';
}

std::uint32_t Simulation::pool_store(const Packet& p) {
    if (!free_slots_.empty()) {
        const std::uint32_t slot = free_slots_.back();
        free_slots_.pop_back();
        pool_[slot] = p;
        return slot;
    }
    pool_.push_back(p);
    return static_cast<std::uint32_t>(pool_.size() - 1);
}

Packet Simulation::pool_take(std::uint32_t slot) {
    free_slots_.push_back(slot);
    return pool_[slot];
}

void Simulation::offer_to_port(const Packet& p, LinkId link, SimTime now) {
    Port& port = ports_[link];
    if (port.qdisc->enqueue(p, now) == EnqueueOutcome::Dropped) {
        log_drop(now, link, p, DropReason::BufferFull);
        return;
    }
    // Service starts via a same-time event so simultaneous arrivals settle
    // into the buffer before the first dequeue.
    if (!port.busy && !port.start_pending) {
        port.start_pending = true;
        engine_.schedule(now, EventKind::PortDequeueReady, link);
    }
}

void Simulation::emit_packet(Packet&& p) {
    p.route = &routes_.route(p.src, p.dst);
    p.hop = 0;
    metrics_.record_sent(p.created_at, p.tos, p.size_bytes);
    offer_to_port(p, (*p.route)[0], p.created_at);
}

void Simulation::on_source_emit(const Event& ev) {
    const SimTime now = engine_.now();
    if (ev.payload == kVoipSource) {
        VoipSource& src = voip_[ev.target];
        Packet p = src.make_packet(now, next_packet_id_++);
        emit_packet(std::move(p));
        const SimTime next = src.next_emit(now);
        if (next < src.spec().stop) {
            engine_.schedule(next, EventKind::SourceEmit, ev.target, kVoipSource);
        }
        return;
    }
    FtpSource& src = ftp_[ev.target];
    for (Packet& p : src.make_request(now, next_packet_id_)) {
        emit_packet(std::move(p));
    }
    const SimTime next = src.next_epoch(now);
    if (next < src.spec().stop) {
        engine_.schedule(next, EventKind::SourceEmit, ev.target, kFtpSource);
    }
}

void Simulation::on_port_ready(const Event& ev) {
    const SimTime now = engine_.now();
    Port& port = ports_[ev.target];
    port.start_pending = false;
    port.busy = false;
    auto next = port.qdisc->dequeue(now);
    if (!next) return;
    port.busy = true;
    const Link& link = topo_.links[ev.target];
    const SimTime serialization = link_transmission_delay(link, next->size_bytes);
    const std::uint32_t slot = pool_store(*next);
    ++propagating_;
    engine_.schedule(now + serialization + link.prop_delay, EventKind::LinkDeliver, ev.target,
                     slot);
    engine_.schedule(now + serialization, EventKind::PortDequeueReady, ev.target);
}

void Simulation::on_link_deliver(const Event& ev) {
    const SimTime now = engine_.now();
    const Link& link = topo_.links[ev.target];
    --propagating_;
    Packet p = pool_take(ev.payload);

    if (link_noise_[link.id].has_value()) {
        const double p_err = link_error_probability(link, p.size_bytes);
        if (link_noise_[link.id]->uniform01() < p_err) {
            log_drop(now, link.id, p, DropReason::BitError);
            return;
        }
    }

    const Node& here = topo_.nodes[link.dst];
    if (here.kind == NodeKind::Host) {
        metrics_.record_delivery(sink_receive(here.id, p, now));
        return;
    }
    ++p.hop;
    offer_to_port(p, (*p.route)[p.hop], now);
}

RunResult Simulation::run() {
    for (std::uint32_t i = 0; i < voip_.size(); ++i) {
        const auto& spec = voip_[i].spec();
        if (spec.start < spec.stop) {
            engine_.schedule(spec.start, EventKind::SourceEmit, i, kVoipSource);
        }
    }
    for (std::uint32_t i = 0; i < ftp_.size(); ++i) {
        const SimTime first = ftp_[i].next_epoch(ftp_[i].spec().start);
        if (first < ftp_[i].spec().stop) {
            engine_.schedule(first, EventKind::SourceEmit, i, kFtpSource);
        }
    }
    engine_.schedule(scenario_.duration, EventKind::RunEnd);

    const RunStats stats = engine_.run_until(scenario_.duration);

    std::int64_t queued = 0;
    for (const auto& port : ports_) queued += static_cast<std::int64_t>(port.qdisc->occupancy());

    RunResult result{RunMeta{to_string(scenario_.qdisc.kind), scenario_.seed, scenario_.duration,
                             scenario_.bucket_width},
                     std::move(metrics_), stats, queued + propagating_, std::move(drop_log_)};
    return result;
}

RunResult run_scenario(const Scenario& scenario) {
    Simulation sim(scenario);
    return sim.run();
}

RunResult run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir,
                       RunOptions options) {
    Simulation sim(scenario, options);
    RunResult result = sim.run();

    export_metrics(result.metrics, result.meta, out_dir);
    std::ofstream eff(out_dir / "effective-scenario", std::ios::binary);
    if (!eff) throw IoFailure("cannot write " + (out_dir / "effective-scenario").string());
    eff << effective_scenario_text(scenario);
    if (options.drop_log) {
        std::ofstream dl(out_dir / "drops.csv", std::ios::binary);
        if (!dl) throw IoFailure("cannot write " + (out_dir / "drops.csv").string());
        dl << result.drop_log;
    }
    return result;
}

} // namespace stepsim
