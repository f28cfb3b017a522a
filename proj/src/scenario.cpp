#include "stepsim/scenario.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "stepsim/detail/format.hpp"
#include "stepsim/error.hpp"

namespace stepsim {

namespace {

struct RawEntry {
    std::string value;
    int line = 0; // 0 for flag overrides
};

// section name -> key -> entry; later assignments win.
using RawScenario = std::map<std::string, std::map<std::string, RawEntry>>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_at(int line, const std::string& msg) {
    if (line > 0) throw ParseError("line " + std::to_string(line) + ": " + msg);
    throw ParseError("override: " + msg);
}

bool section_ok(const std::string& name) {
    if (name == "topology" || name == "qdisc" || name == "run") return true;
    for (const char* prefix : {"voip.", "ftp."}) {
        if (name.rfind(prefix, 0) == 0) {
            const std::string idx = name.substr(std::string(prefix).size());
            return !idx.empty() && idx.find_first_not_of("0123456789") == std::string::npos;
        }
    }
    return false;
}

RawScenario parse_raw(const std::string& text) {
    RawScenario raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail_at(lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!section_ok(section)) fail_at(lineno, "unknown section [" + section + "]");
            raw[section]; // sections may be empty; still must exist
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail_at(lineno, "expected `key = value`");
        if (section.empty()) fail_at(lineno, "key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail_at(lineno, "empty key");
        if (value.empty()) fail_at(lineno, "empty value for key '" + key + "'");
        raw[section][key] = RawEntry{value, lineno};
    }
    return raw;
}

void apply_overrides(RawScenario& raw, const std::vector<ScenarioOverride>& overrides) {
    for (const auto& [path, value] : overrides) {
        // section.key, where voip/ftp sections themselves contain a dot.
        const auto last_dot = path.rfind('.');
        if (last_dot == std::string::npos || last_dot == 0 || last_dot + 1 == path.size()) {
            throw ParseError("override '" + path + "' is not of the form section.key");
        }
        std::string section = path.substr(0, last_dot);
        std::string key = path.substr(last_dot + 1);
        // wfq_weight.N keys also contain a dot; re-split when the section
        // half is not a valid section name.
        if (!section_ok(section)) {
            const auto first_dot = section.rfind('.');
            if (first_dot != std::string::npos) {
                key = section.substr(first_dot + 1) + "." + key;
                section = section.substr(0, first_dot);
            }
        }
        if (!section_ok(section)) throw ParseError("override names unknown section '" + section + "'");
        raw[section][key] = RawEntry{value, 0};
    }
}

// -- typed readers ----------------------------------------------------------

std::uint64_t to_u64(const RawEntry& e, const std::string& key) {
    const std::string& v = e.value;
    if (v.find_first_not_of("0123456789") != std::string::npos) {
        fail_at(e.line, "key '" + key + "' expects an unsigned integer, got '" + v + "'");
    }
    errno = 0;
    char* end = nullptr;
    const std::uint64_t out = std::strtoull(v.c_str(), &end, 10);
    if (errno != 0 || end != v.c_str() + v.size()) {
        fail_at(e.line, "key '" + key + "' has an out-of-range integer '" + v + "'");
    }
    return out;
}

double to_f64(const RawEntry& e, const std::string& key) {
    errno = 0;
    char* end = nullptr;
    const double out = std::strtod(e.value.c_str(), &end);
    if (errno != 0 || end != e.value.c_str() + e.value.size()) {
        fail_at(e.line, "key '" + key + "' expects a number, got '" + e.value + "'");
    }
    return out;
}

/// Pulls typed values out of one section and complains about leftovers.
class SectionReader {
public:
    SectionReader(std::string name, std::map<std::string, RawEntry> entries)
        : name_(std::move(name)), entries_(std::move(entries)) {}

    template <typename T, typename Fn>
    void get(const std::string& key, T& out, Fn&& convert) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return;
        out = convert(it->second, key);
        entries_.erase(it);
    }

    void get_u64(const std::string& key, std::uint64_t& out) { get(key, out, to_u64); }
    void get_u32(const std::string& key, std::uint32_t& out) {
        std::uint64_t v = out;
        get(key, v, to_u64);
        out = static_cast<std::uint32_t>(v);
    }
    void get_f64(const std::string& key, double& out) { get(key, out, to_f64); }
    void get_seconds(const std::string& key, SimTime& out) {
        get(key, out,
            [](const RawEntry& e, const std::string& k) {
                return SimTime::from_seconds(to_f64(e, k));
            });
    }
    void get_seconds_opt(const std::string& key, std::optional<SimTime>& out) {
        get(key, out,
            [](const RawEntry& e, const std::string& k) -> std::optional<SimTime> {
                return SimTime::from_seconds(to_f64(e, k));
            });
    }
    void get_string(const std::string& key, std::string& out) {
        get(key, out, [](const RawEntry& e, const std::string&) { return e.value; });
    }
    void get_tos(const std::string& key, ClassId& out) {
        std::uint64_t v = out;
        get(key, v, to_u64);
        if (v >= kTosLevels) {
            throw ValidationError("[" + name_ + "] " + key + " must be in [0,7]");
        }
        out = static_cast<ClassId>(v);
    }

    /// Removes and returns every entry whose key starts with prefix.
    std::map<std::string, RawEntry> take_prefixed(const std::string& prefix) {
        std::map<std::string, RawEntry> taken;
        for (auto it = entries_.begin(); it != entries_.end();) {
            if (it->first.rfind(prefix, 0) == 0) {
                taken.emplace(it->first, it->second);
                it = entries_.erase(it);
            } else {
                ++it;
            }
        }
        return taken;
    }

    void finish() const {
        if (entries_.empty()) return;
        const auto& [key, entry] = *entries_.begin();
        fail_at(entry.line, "key '" + key + "' not valid in section [" + name_ + "]");
    }

private:
    std::string name_;
    std::map<std::string, RawEntry> entries_;
};

Scenario from_raw(RawScenario raw) {
    Scenario s;

    if (auto it = raw.find("topology"); it != raw.end()) {
        SectionReader r("topology", std::move(it->second));
        r.get_u32("steps", s.topology.steps);
        r.get_u32("hosts_per_step", s.topology.hosts_per_step);
        r.get_u64("backbone_rate_bps", s.topology.backbone_rate_bps);
        r.get_u64("access_rate_bps", s.topology.access_rate_bps);
        r.get_seconds("backbone_prop_delay_s", s.topology.backbone_prop_delay);
        r.get_seconds("access_prop_delay_s", s.topology.access_prop_delay);
        r.get_f64("ber", s.topology.ber);
        r.finish();
        raw.erase("topology");
    }
    if (auto it = raw.find("qdisc"); it != raw.end()) {
        SectionReader r("qdisc", std::move(it->second));
        std::string kind = to_string(s.qdisc.kind);
        r.get_string("kind", kind);
        const auto parsed = qdisc_kind_from_string(kind);
        if (!parsed) throw ValidationError("[qdisc] kind must be fifo, pq or wfq");
        s.qdisc.kind = *parsed;
        r.get_u32("buffer_packets", s.qdisc.buffer_capacity_packets);
        std::uint64_t levels = s.qdisc.pq_levels;
        r.get_u64("pq_levels", levels);
        if (levels < 1 || levels > kTosLevels) {
            throw ValidationError("[qdisc] pq_levels must be in [1,8]");
        }
        s.qdisc.pq_levels = static_cast<std::uint8_t>(levels);
        for (const auto& [key, entry] : r.take_prefixed("wfq_weight.")) {
            const std::string suffix = key.substr(std::string("wfq_weight.").size());
            if (suffix.size() != 1 || suffix[0] < '0' || suffix[0] > '7') {
                fail_at(entry.line, "wfq_weight expects a ToS in [0,7], got '" + suffix + "'");
            }
            s.qdisc.wfq_weights[static_cast<ClassId>(suffix[0] - '0')] = to_f64(entry, key);
        }
        r.finish();
        raw.erase("qdisc");
    }
    if (auto it = raw.find("run"); it != raw.end()) {
        SectionReader r("run", std::move(it->second));
        r.get_seconds("duration_s", s.duration);
        r.get_u64("seed", s.seed);
        r.get_seconds("bucket_width_s", s.bucket_width);
        r.finish();
        raw.erase("run");
    }

    auto read_sources = [&raw](const std::string& prefix, auto& out, auto&& fill) {
        std::map<std::uint64_t, SectionReader> ordered;
        for (auto it = raw.begin(); it != raw.end();) {
            if (it->first.rfind(prefix, 0) != 0) {
                ++it;
                continue;
            }
            const std::uint64_t index =
                std::strtoull(it->first.substr(prefix.size()).c_str(), nullptr, 10);
            ordered.emplace(index, SectionReader(it->first, std::move(it->second)));
            it = raw.erase(it);
        }
        for (auto& [index, reader] : ordered) {
            typename std::decay_t<decltype(out)>::value_type p;
            fill(reader, p);
            reader.finish();
            out.push_back(std::move(p));
        }
    };

    read_sources("voip.", s.voip_sources, [](SectionReader& r, VoipPlacement& p) {
        r.get_string("src", p.src);
        r.get_string("dst", p.dst);
        r.get_seconds("frame_interval_s", p.frame_interval);
        r.get_u32("payload_bytes", p.payload_bytes);
        r.get_u32("header_bytes", p.header_bytes);
        r.get_seconds("start_s", p.start);
        r.get_seconds_opt("stop_s", p.stop);
        r.get_tos("tos", p.tos);
    });
    read_sources("ftp.", s.ftp_sources, [](SectionReader& r, FtpPlacement& p) {
        r.get_string("src", p.src);
        r.get_string("dst", p.dst);
        r.get_f64("mean_interrequest_s", p.mean_interrequest_s);
        r.get_u64("file_bytes", p.file_bytes);
        r.get_u32("segment_payload_bytes", p.segment_payload_bytes);
        r.get_u32("header_bytes", p.header_bytes);
        r.get_seconds("start_s", p.start);
        r.get_seconds_opt("stop_s", p.stop);
        r.get_tos("tos", p.tos);
    });

    if (!raw.empty()) {
        throw ParseError("unknown section [" + raw.begin()->first + "]");
    }
    return s;
}

} // namespace

void Scenario::validate() const {
    if (topology.steps < 1) throw ValidationError("[topology] steps must be >= 1");
    if (topology.hosts_per_step < 1) {
        throw ValidationError("[topology] hosts_per_step must be >= 1");
    }
    if (topology.backbone_rate_bps == 0 || topology.access_rate_bps == 0) {
        throw ValidationError("[topology] link rates must be > 0");
    }
    if (topology.ber < 0.0 || topology.ber >= 1.0) {
        throw ValidationError("[topology] ber must be in [0,1)");
    }
    if (qdisc.buffer_capacity_packets < 1) {
        throw ValidationError("[qdisc] buffer_packets must be >= 1");
    }
    for (const auto& [tos, w] : qdisc.wfq_weights) {
        if (w <= 0.0) throw ValidationError("[qdisc] wfq_weight must be > 0");
    }
    if (duration.ns <= 0) throw ValidationError("[run] duration_s must be > 0");
    if (bucket_width.ns <= 0) throw ValidationError("[run] bucket_width_s must be > 0");
    if (voip_sources.empty() && ftp_sources.empty()) {
        throw ValidationError("scenario needs at least one source");
    }

    const Topology topo = build_step_topology(topology);
    auto check_host = [&](const std::string& name, const std::string& where) {
        const Node* n = topo.find_node(name);
        if (n == nullptr || n->kind != NodeKind::Host) {
            throw ValidationError("[" + where + "] '" + name + "' does not name a host");
        }
    };
    for (std::size_t i = 0; i < voip_sources.size(); ++i) {
        const auto& p = voip_sources[i];
        const std::string where = "voip." + std::to_string(i);
        check_host(p.src, where);
        check_host(p.dst, where);
        if (p.src == p.dst) throw ValidationError("[" + where + "] src and dst must differ");
        if (p.frame_interval.ns <= 0) {
            throw ValidationError("[" + where + "] frame_interval_s must be > 0");
        }
        if (p.payload_bytes < 1) throw ValidationError("[" + where + "] payload_bytes must be >= 1");
        if (p.start.ns < 0 || stop_of(p) < p.start) {
            throw ValidationError("[" + where + "] needs 0 <= start_s <= stop_s");
        }
    }
    for (std::size_t i = 0; i < ftp_sources.size(); ++i) {
        const auto& p = ftp_sources[i];
        const std::string where = "ftp." + std::to_string(i);
        check_host(p.src, where);
        check_host(p.dst, where);
        if (p.src == p.dst) throw ValidationError("[" + where + "] src and dst must differ");
        if (p.mean_interrequest_s <= 0.0) {
            throw ValidationError("[" + where + "] mean_interrequest_s must be > 0");
        }
        if (p.file_bytes < 1) throw ValidationError("[" + where + "] file_bytes must be >= 1");
        if (p.segment_payload_bytes < 1) {
            throw ValidationError("[" + where + "] segment_payload_bytes must be >= 1");
        }
        if (p.start.ns < 0 || stop_of(p) < p.start) {
            throw ValidationError("[" + where + "] needs 0 <= start_s <= stop_s");
        }
    }
}

Scenario parse_scenario(const std::string& text,
                        const std::vector<ScenarioOverride>& overrides) {
    RawScenario raw = parse_raw(text);
    apply_overrides(raw, overrides);
    Scenario s = from_raw(std::move(raw));
    s.validate();
    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path,
                            const std::vector<ScenarioOverride>& overrides) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoFailure("cannot read scenario file " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_scenario(buf.str(), overrides);
}

std::string effective_scenario_text(const Scenario& s) {
    using detail::format_double;
    std::string out;
    auto kv = [&out](const std::string& key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };

    out += "[topology]\n";
    kv("steps", std::to_string(s.topology.steps));
    kv("hosts_per_step", std::to_string(s.topology.hosts_per_step));
    kv("backbone_rate_bps", std::to_string(s.topology.backbone_rate_bps));
    kv("access_rate_bps", std::to_string(s.topology.access_rate_bps));
    kv("backbone_prop_delay_s", format_double(s.topology.backbone_prop_delay.seconds()));
    kv("access_prop_delay_s", format_double(s.topology.access_prop_delay.seconds()));
    kv("ber", format_double(s.topology.ber));

    out += "\n[qdisc]\n";
    kv("kind", to_string(s.qdisc.kind));
    kv("buffer_packets", std::to_string(s.qdisc.buffer_capacity_packets));
    kv("pq_levels", std::to_string(s.qdisc.pq_levels));
    for (const auto& [tos, w] : s.qdisc.wfq_weights) {
        kv("wfq_weight." + std::to_string(tos), format_double(w));
    }

    for (std::size_t i = 0; i < s.voip_sources.size(); ++i) {
        const auto& p = s.voip_sources[i];
        out += "\n[voip." + std::to_string(i) + "]\n";
        kv("src", p.src);
        kv("dst", p.dst);
        kv("frame_interval_s", format_double(p.frame_interval.seconds()));
        kv("payload_bytes", std::to_string(p.payload_bytes));
        kv("header_bytes", std::to_string(p.header_bytes));
        kv("start_s", format_double(p.start.seconds()));
        kv("stop_s", format_double(s.stop_of(p).seconds()));
        kv("tos", std::to_string(p.tos));
    }
    for (std::size_t i = 0; i < s.ftp_sources.size(); ++i) {
        const auto& p = s.ftp_sources[i];
        out += "\n[ftp." + std::to_string(i) + "]\n";
        kv("src", p.src);
        kv("dst", p.dst);
        kv("mean_interrequest_s", format_double(p.mean_interrequest_s));
        kv("file_bytes", std::to_string(p.file_bytes));
        kv("segment_payload_bytes", std::to_string(p.segment_payload_bytes));
        kv("header_bytes", std::to_string(p.header_bytes));
        kv("start_s", format_double(p.start.seconds()));
        kv("stop_s", format_double(s.stop_of(p).seconds()));
        kv("tos", std::to_string(p.tos));
    }

    out += "\n[run]\n";
    kv("duration_s", format_double(s.duration.seconds()));
    kv("seed", std::to_string(s.seed));
    kv("bucket_width_s", format_double(s.bucket_width.seconds()));
    return out;
}

} // namespace stepsim
