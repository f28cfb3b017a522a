#ifndef STEPSIM_SIMULATION_HPP
#define STEPSIM_SIMULATION_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stepsim/engine.hpp"
#include "stepsim/metrics.hpp"
#include "stepsim/qdisc.hpp"
#include "stepsim/scenario.hpp"
#include "stepsim/topology.hpp"
#include "stepsim/traffic.hpp"

namespace stepsim {

struct RunResult {
    RunMeta meta;
    MetricsStore metrics;
    RunStats engine_stats;
    std::int64_t physical_in_flight = 0; // queued + on-wire walk at run end
    std::string drop_log;                // populated when requested
};

struct RunOptions {
    bool drop_log = false;
    bool trace = false; // record the kernel event trace (tests)
};

/// One scenario wired onto one engine instance: topology, per-link egress
/// ports, sources, sinks, metrics. Single-threaded; build a fresh instance
/// per run.
class Simulation {
public:
    explicit Simulation(const Scenario& scenario, RunOptions options = {});

    RunResult run();

    const Topology& topology() const { return topo_; }
    const Engine& engine() const { return engine_; }

private:
    struct Port {
        std::unique_ptr<Qdisc> qdisc;
        bool busy = false;
        bool start_pending = false;
    };

    void on_source_emit(const Event& ev);
    void on_port_ready(const Event& ev);
    void on_link_deliver(const Event& ev);

    void emit_packet(Packet&& p);
    void offer_to_port(const Packet& p, LinkId link, SimTime now);

    std::uint32_t pool_store(const Packet& p);
    Packet pool_take(std::uint32_t slot);

    void log_drop(SimTime t, LinkId link, const Packet& p, DropReason reason);

    std::string port_name(LinkId link) const;

    Scenario scenario_;
    RunOptions options_;
    Topology topo_;
    RoutingTable routes_;
    Engine engine_;
    MetricsStore metrics_;

    std::vector<Port> ports_; // index == LinkId
    std::vector<VoipSource> voip_;
    std::vector<FtpSource> ftp_;
    std::vector<std::optional<RandomStream>> link_noise_; // only when ber > 0

    std::vector<Packet> pool_; // packets in serialization/propagation
    std::vector<std::uint32_t> free_slots_;
    std::uint64_t next_packet_id_ = 0;
    std::int64_t propagating_ = 0;
    std::string drop_log_;
};

/// Builds, runs, optionally exports. With out_dir set, writes series.csv,
/// summary.json and effective-scenario (plus drops.csv when enabled).
RunResult run_scenario(const Scenario& scenario);
RunResult run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir,
                       RunOptions options = {});

} // namespace stepsim

#endif
