#ifndef STEPSIM_SCENARIO_HPP
#define STEPSIM_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stepsim/qdisc.hpp"
#include "stepsim/time.hpp"
#include "stepsim/topology.hpp"

namespace stepsim {

/// Source placements name hosts by their topology name ("h<step>.<index>");
/// names resolve against the built topology at validation time.
struct VoipPlacement {
    std::string src;
    std::string dst;
    SimTime frame_interval = SimTime::from_ns(20'000'000);
    std::uint32_t payload_bytes = 160;
    std::uint32_t header_bytes = 40;
    SimTime start;
    std::optional<SimTime> stop; // default: run duration
    ClassId tos = kTosVoice;
};

struct FtpPlacement {
    std::string src;
    std::string dst;
    double mean_interrequest_s = 1.0;
    std::uint64_t file_bytes = 1'000'000;
    std::uint32_t segment_payload_bytes = 1460;
    std::uint32_t header_bytes = 40;
    SimTime start;
    std::optional<SimTime> stop;
    ClassId tos = kTosBestEffort;
};

/// One experiment definition: topology, scheduler, sources, run controls.
struct Scenario {
    StepSpec topology;
    QdiscConfig qdisc;
    std::vector<VoipPlacement> voip_sources;
    std::vector<FtpPlacement> ftp_sources;
    SimTime duration = SimTime::from_seconds(10);
    std::uint64_t seed = 1;
    SimTime bucket_width = SimTime::from_seconds(1);

    SimTime stop_of(const VoipPlacement& p) const { return p.stop.value_or(duration); }
    SimTime stop_of(const FtpPlacement& p) const { return p.stop.value_or(duration); }

    /// Throws ValidationError naming the violated invariant. Builds the
    /// topology to resolve placement names.
    void validate() const;
};

using ScenarioOverride = std::pair<std::string, std::string>; // "section.key", value

/// Parses the flat sectioned key-value format: [topology] [qdisc] [voip.N]
/// [ftp.N] [run] sections, `key = value` lines, `#` comments. Unknown
/// sections or keys are ParseErrors carrying the line number; the result is
/// validated before return.
Scenario parse_scenario(const std::string& text,
                        const std::vector<ScenarioOverride>& overrides = {});

Scenario load_scenario_file(const std::filesystem::path& path,
                            const std::vector<ScenarioOverride>& overrides = {});

/// Canonical text for the scenario with every default resolved; reparsing it
/// reproduces the scenario. Written next to run outputs as
/// `effective-scenario`.
std::string effective_scenario_text(const Scenario& s);

} // namespace stepsim

#endif
