#include "smr/config.hpp"

#include <fstream>
#include <map>

namespace smr {

using nlohmann::json;

namespace {

const std::map<std::string, ProtocolKind> kProtocols = {
    {"pbft-light", ProtocolKind::PbftLight},
    {"pbft-rotation", ProtocolKind::PbftRotation},
    {"hotstuff-light", ProtocolKind::HotstuffLight},
    {"toy-client", ProtocolKind::ToyClient},
    {"consensus-sync", ProtocolKind::ConsensusSync},
};

const std::map<std::string, Behavior> kBehaviors = {
    {"crash", Behavior::Crash},           {"wish-spam", Behavior::WishSpam},
    {"random-wish", Behavior::RandomWish}, {"equivocate", Behavior::Equivocate},
    {"withhold", Behavior::Withhold},     {"censor", Behavior::Censor},
    {"stale-cert", Behavior::StaleCert},  {"vote-spam", Behavior::VoteSpam},
};

const std::map<std::string, FaultDirective::Kind> kKinds = {
    {"drop", FaultDirective::Kind::Drop},
    {"delay", FaultDirective::Kind::Delay},
    {"isolate", FaultDirective::Kind::Isolate},
    {"byzantine", FaultDirective::Kind::Byzantine},
    {"random_drift", FaultDirective::Kind::RandomDrift},
    {"post_gst_delay", FaultDirective::Kind::PostGstDelay},
};

template <class Map>
std::string key_of(const Map& m, typename Map::mapped_type v) {
    for (const auto& [k, val] : m)
        if (val == v) return k;
    return "?";
}

template <class T>
T get_or(const json& j, const char* key, T dflt) {
    if (!j.contains(key)) return dflt;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

FaultDirective directive_from_json(const json& j) {
    FaultDirective d;
    auto kind = get_or<std::string>(j, "kind", "");
    auto it = kKinds.find(kind);
    if (it == kKinds.end()) throw ConfigError("unknown fault directive kind '" + kind + "'");
    d.kind = it->second;
    d.probability = get_or<double>(j, "probability", 0.0);
    d.max_delay = get_or<Tick>(j, "max", 0);
    d.pid = get_or<Pid>(j, "pid", 0);
    d.until = get_or<Tick>(j, "until", 0);
    d.at = get_or<Tick>(j, "at", 0);
    d.target = get_or<Pid>(j, "target", 0);
    d.min_num = get_or<std::int64_t>(j, "min_num", 1);
    d.max_num = get_or<std::int64_t>(j, "max_num", 1);
    d.den = get_or<std::int64_t>(j, "den", 1);
    d.mode = get_or<std::string>(j, "mode", "uniform");
    if (d.kind == FaultDirective::Kind::Byzantine)
        d.behavior = behavior_from_string(get_or<std::string>(j, "behavior", ""));
    return d;
}

json directive_to_json(const FaultDirective& d) {
    json j;
    j["kind"] = key_of(kKinds, d.kind);
    switch (d.kind) {
        case FaultDirective::Kind::Drop: j["probability"] = d.probability; break;
        case FaultDirective::Kind::Delay: j["max"] = d.max_delay; break;
        case FaultDirective::Kind::Isolate:
            j["pid"] = d.pid;
            j["until"] = d.until;
            break;
        case FaultDirective::Kind::Byzantine:
            j["pid"] = d.pid;
            j["behavior"] = to_string(d.behavior);
            if (d.at) j["at"] = d.at;
            if (d.target) j["target"] = d.target;
            break;
        case FaultDirective::Kind::RandomDrift:
            j["min_num"] = d.min_num;
            j["max_num"] = d.max_num;
            j["den"] = d.den;
            break;
        case FaultDirective::Kind::PostGstDelay: j["mode"] = d.mode; break;
    }
    return j;
}

}  // namespace

std::string to_string(ProtocolKind p) { return key_of(kProtocols, p); }

ProtocolKind protocol_from_string(const std::string& s) {
    auto it = kProtocols.find(s);
    if (it == kProtocols.end()) throw ConfigError("unknown protocol '" + s + "'");
    return it->second;
}

std::string to_string(Behavior b) { return key_of(kBehaviors, b); }

Behavior behavior_from_string(const std::string& s) {
    auto it = kBehaviors.find(s);
    if (it == kBehaviors.end()) throw ConfigError("unknown byzantine behavior '" + s + "'");
    return it->second;
}

std::vector<Behavior> ScenarioConfig::behaviors_of(Pid p) const {
    std::vector<Behavior> out;
    for (const auto& d : fault_plan)
        if (d.kind == FaultDirective::Kind::Byzantine && d.pid == p) out.push_back(d.behavior);
    return out;
}

std::optional<Tick> ScenarioConfig::crash_time(Pid p) const {
    for (const auto& d : fault_plan)
        if (d.kind == FaultDirective::Kind::Byzantine && d.pid == p && d.behavior == Behavior::Crash)
            return d.at;
    return std::nullopt;
}

void validate(const ScenarioConfig& c) {
    if (c.f < 1 && c.n != 1) throw ConfigError("f must be at least 1");
    if (c.n != 3 * c.f + 1) throw ConfigError("n must equal 3f+1");
    if (c.faulty.size() > c.f) throw ConfigError("more faulty processes than f");
    for (Pid p : c.faulty)
        if (p < 1 || p > c.n) throw ConfigError("faulty pid out of range");
    if (c.gst < 0) throw ConfigError("gst must be non-negative");
    if (c.delta < 1) throw ConfigError("delta must be at least 1 tick");
    if (c.delta > c.delta_cap) throw ConfigError("delta must not exceed delta_cap");
    if (c.rho < 1 || c.tau < 1 || c.t_broadcast < 1) throw ConfigError("rho, tau, t_broadcast must be positive");
    if (c.batch < 1) throw ConfigError("batch must be positive");
    if (c.init_dur_delivery < 1 || c.init_dur_recovery < 1) throw ConfigError("initial timeouts must be positive");
    if (c.horizon <= c.gst) throw ConfigError("horizon must exceed gst");
    if (!c.drift.empty() && c.drift.size() != c.n) throw ConfigError("drift needs one rate per process");
    if (!c.start_times.empty() && c.start_times.size() != c.n)
        throw ConfigError("start_times needs one entry per process");
    if (c.start_times.empty() && c.start_lo > c.start_hi) throw ConfigError("start_window is empty");
    if (c.workload.window_lo > c.workload.window_hi) throw ConfigError("workload window is empty");
    for (const auto& b : c.workload.explicit_broadcasts)
        if (b.pid < 1 || b.pid > c.n) throw ConfigError("broadcast pid out of range");
    for (const auto& d : c.fault_plan) {
        if (d.kind == FaultDirective::Kind::Byzantine && !c.is_faulty(d.pid))
            throw ConfigError("byzantine directive for a pid outside faulty_set");
        if (d.kind == FaultDirective::Kind::Drop && (d.probability < 0.0 || d.probability > 1.0))
            throw ConfigError("drop probability outside [0,1]");
        if (d.kind == FaultDirective::Kind::RandomDrift && (d.min_num < 1 || d.max_num < d.min_num || d.den < 1))
            throw ConfigError("random_drift range invalid");
        if (d.kind == FaultDirective::Kind::PostGstDelay && d.mode != "uniform" && d.mode != "max")
            throw ConfigError("post_gst_delay mode must be uniform or max");
    }
}

ScenarioConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (get_or<int>(j, "format", 0) != 1) throw ConfigError("config 'format' must be 1");
    ScenarioConfig c;
    c.name = get_or<std::string>(j, "name", "");
    c.n = get_or<std::uint32_t>(j, "n", 4);
    c.f = get_or<std::uint32_t>(j, "f", 1);
    for (Pid p : get_or<std::vector<Pid>>(j, "faulty", {})) c.faulty.insert(p);
    c.gst = get_or<Tick>(j, "gst", 0);
    c.delta = get_or<Tick>(j, "delta", 1);
    c.delta_cap = get_or<Tick>(j, "delta_cap", c.delta);
    c.rho = get_or<Tick>(j, "rho", 1);
    c.tau = get_or<Tick>(j, "tau", 1);
    c.t_broadcast = get_or<Tick>(j, "t_broadcast", 1);
    c.batch = get_or<std::uint64_t>(j, "batch", 1);
    c.init_dur_delivery = get_or<Tick>(j, "init_dur_delivery", 1);
    c.init_dur_recovery = get_or<Tick>(j, "init_dur_recovery", 1);
    if (j.contains("drift")) {
        for (const auto& r : j.at("drift")) {
            if (!r.is_array() || r.size() != 2) throw ConfigError("drift entries must be [num, den]");
            try {
                c.drift.emplace_back(r[0].get<std::int64_t>(), r[1].get<std::int64_t>());
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
    }
    c.start_times = get_or<std::vector<Tick>>(j, "start_times", {});
    if (j.contains("start_window")) {
        auto w = get_or<std::vector<Tick>>(j, "start_window", {});
        if (w.size() != 2) throw ConfigError("start_window must be [lo, hi]");
        c.start_lo = w[0];
        c.start_hi = w[1];
    }
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
    c.horizon = get_or<Tick>(j, "horizon", 1);
    c.protocol = protocol_from_string(get_or<std::string>(j, "protocol", "pbft-light"));
    c.latency_mode = get_or<bool>(j, "latency_mode", false);
    c.max_pre_gst_delay = get_or<Tick>(j, "max_pre_gst_delay", 0);
    c.view_duration_unit = get_or<Tick>(j, "view_duration_unit", 0);
    c.tick_ns = get_or<std::int64_t>(j, "tick_ns", 1'000'000);
    {
        auto lvl = get_or<std::string>(j, "trace_level", "standard");
        if (lvl == "minimal")
            c.trace_level = TraceLevel::Minimal;
        else if (lvl == "standard")
            c.trace_level = TraceLevel::Standard;
        else if (lvl == "full")
            c.trace_level = TraceLevel::Full;
        else
            throw ConfigError("trace_level must be minimal, standard or full");
    }
    c.mem_sample_every = get_or<std::int64_t>(j, "mem_sample_every", 1);
    if (j.contains("workload")) {
        const auto& w = j.at("workload");
        c.workload.per_process = get_or<int>(w, "per_process", 0);
        auto win = get_or<std::vector<Tick>>(w, "window", {0, 0});
        if (win.size() != 2) throw ConfigError("workload window must be [lo, hi]");
        c.workload.window_lo = win[0];
        c.workload.window_hi = win[1];
        if (w.contains("broadcasts"))
            for (const auto& b : w.at("broadcasts"))
                c.workload.explicit_broadcasts.push_back({get_or<Pid>(b, "pid", 0), get_or<Tick>(b, "at", 0)});
    }
    if (j.contains("fault_plan"))
        for (const auto& d : j.at("fault_plan")) c.fault_plan.push_back(directive_from_json(d));
    c.checks = get_or<std::vector<std::string>>(j, "checks", {});
    c.require_premises = get_or<std::vector<std::string>>(j, "require_premises", {});
    c.target_view = get_or<View>(j, "target_view", 0);
    if (j.contains("liveness_cutoff")) c.liveness_cutoff = get_or<Tick>(j, "liveness_cutoff", 0);
    validate(c);
    return c;
}

json config_to_json(const ScenarioConfig& c) {
    json j;
    j["format"] = 1;
    if (!c.name.empty()) j["name"] = c.name;
    j["tick_ns"] = c.tick_ns;
    j["protocol"] = to_string(c.protocol);
    j["n"] = c.n;
    j["f"] = c.f;
    j["faulty"] = std::vector<Pid>(c.faulty.begin(), c.faulty.end());
    j["gst"] = c.gst;
    j["delta"] = c.delta;
    j["delta_cap"] = c.delta_cap;
    j["rho"] = c.rho;
    j["tau"] = c.tau;
    j["t_broadcast"] = c.t_broadcast;
    j["batch"] = c.batch;
    j["init_dur_delivery"] = c.init_dur_delivery;
    j["init_dur_recovery"] = c.init_dur_recovery;
    if (!c.drift.empty()) {
        json d = json::array();
        for (const auto& r : c.drift) d.push_back({r.num, r.den});
        j["drift"] = d;
    }
    if (!c.start_times.empty())
        j["start_times"] = c.start_times;
    else
        j["start_window"] = {c.start_lo, c.start_hi};
    j["seed"] = c.seed;
    j["horizon"] = c.horizon;
    j["latency_mode"] = c.latency_mode;
    if (c.max_pre_gst_delay) j["max_pre_gst_delay"] = c.max_pre_gst_delay;
    if (c.view_duration_unit) j["view_duration_unit"] = c.view_duration_unit;
    j["trace_level"] = c.trace_level == TraceLevel::Minimal ? "minimal"
                       : c.trace_level == TraceLevel::Full  ? "full"
                                                            : "standard";
    if (c.mem_sample_every != 1) j["mem_sample_every"] = c.mem_sample_every;
    json w;
    w["per_process"] = c.workload.per_process;
    w["window"] = {c.workload.window_lo, c.workload.window_hi};
    if (!c.workload.explicit_broadcasts.empty()) {
        json bs = json::array();
        for (const auto& b : c.workload.explicit_broadcasts) bs.push_back({{"pid", b.pid}, {"at", b.at}});
        w["broadcasts"] = bs;
    }
    j["workload"] = w;
    json plan = json::array();
    for (const auto& d : c.fault_plan) plan.push_back(directive_to_json(d));
    j["fault_plan"] = plan;
    j["checks"] = c.checks;
    if (!c.require_premises.empty()) j["require_premises"] = c.require_premises;
    if (c.target_view) j["target_view"] = c.target_view;
    if (c.liveness_cutoff) j["liveness_cutoff"] = *c.liveness_cutoff;
    return j;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return config_from_json(j);
}

}  // namespace smr
