#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stepsim/compare.hpp"
#include "stepsim/detail/format.hpp"
#include "stepsim/error.hpp"
#include "stepsim/scenario.hpp"
#include "stepsim/simulation.hpp"
#include "stepsim/topology.hpp"

namespace {

struct CommonArgs {
    std::string scenario_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> qdisc;
    std::optional<double> duration_s;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_run_overrides = true) {
    cmd->add_option("--scenario", args.scenario_path, "Scenario file")->required();
    cmd->add_option("--set", args.sets,
                    "Override any scenario key, e.g. --set topology.steps=6 "
                    "--set voip.0.payload_bytes=320");
    if (with_run_overrides) {
        cmd->add_option("--seed", args.seed, "Override run.seed");
        cmd->add_option("--duration", args.duration_s, "Override run.duration_s");
    }
}

std::vector<stepsim::ScenarioOverride> collect_overrides(const CommonArgs& args) {
    std::vector<stepsim::ScenarioOverride> overrides;
    for (const auto& kv : args.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == kv.size()) {
            throw stepsim::ParseError("--set expects section.key=value, got '" + kv + "'");
        }
        overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    // Dedicated flags win over --set.
    if (args.seed) overrides.emplace_back("run.seed", std::to_string(*args.seed));
    if (args.duration_s) {
        overrides.emplace_back("run.duration_s", stepsim::detail::format_double(*args.duration_s));
    }
    if (args.qdisc) overrides.emplace_back("qdisc.kind", *args.qdisc);
    return overrides;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Step-topology VoIP/FTP queuing-discipline simulator"};
    app.require_subcommand(1);

    CommonArgs run_args;
    std::string run_out = "out";
    bool run_drop_log = false;
    CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario and export metrics");
    add_common(run_cmd, run_args);
    run_cmd->add_option("--qdisc", run_args.qdisc, "Override qdisc.kind (fifo|pq|wfq)")
        ->check(CLI::IsMember({"fifo", "pq", "wfq"}));
    run_cmd->add_option("--out", run_out, "Output directory");
    run_cmd->add_flag("--drop-log", run_drop_log, "Also write per-port drops.csv");

    CommonArgs cmp_args;
    std::string cmp_out = "out";
    bool cmp_drop_log = false;
    CLI::App* cmp_cmd =
        app.add_subcommand("compare", "Run fifo/pq/wfq on one scenario and score the orderings");
    add_common(cmp_cmd, cmp_args);
    cmp_cmd->add_option("--out", cmp_out, "Output directory");
    cmp_cmd->add_flag("--drop-log", cmp_drop_log, "Also write per-port drops.csv per run");

    CommonArgs topo_args;
    CLI::App* topo_cmd = app.add_subcommand("topo", "Print the scenario's adjacency dump");
    add_common(topo_cmd, topo_args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const auto scenario =
                stepsim::load_scenario_file(run_args.scenario_path, collect_overrides(run_args));
            stepsim::RunOptions options;
            options.drop_log = run_drop_log;
            const auto result = stepsim::run_scenario(scenario, run_out, options);
            const auto& voice = result.metrics.counters(stepsim::kTosVoice);
            std::cout << "run complete: qdisc=" << result.meta.qdisc
                      << " seed=" << result.meta.seed
                      << " events=" << result.engine_stats.events_processed
                      << " voice_received=" << voice.received_packets
                      << " voice_dropped=" << voice.dropped_buffer_full + voice.dropped_bit_error
                      << "\noutputs in " << run_out << "/\n";
            return 0;
        }
        if (cmp_cmd->parsed()) {
            const auto scenario =
                stepsim::load_scenario_file(cmp_args.scenario_path, collect_overrides(cmp_args));
            stepsim::RunOptions options;
            options.drop_log = cmp_drop_log;
            const auto report =
                stepsim::compare_disciplines(scenario, std::filesystem::path(cmp_out), options);
            std::cout << report.to_text();
            std::cout << "report in " << cmp_out << "/comparison.json\n";
            return report.all_pass() ? 0 : 1;
        }
        const auto scenario =
            stepsim::load_scenario_file(topo_args.scenario_path, collect_overrides(topo_args));
        std::cout << stepsim::build_step_topology(scenario.topology).adjacency_dump();
        return 0;
    } catch (const stepsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
