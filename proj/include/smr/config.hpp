#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "smr/types.hpp"

namespace smr {

// Minimal: starts, views, advances, broadcasts, deliveries, memory samples.
// Standard adds WISH and vote sends, timers, certificates and locks. Full adds
// every Send and Receive.
enum class TraceLevel { Minimal, Standard, Full };

enum class ProtocolKind { PbftLight, PbftRotation, HotstuffLight, ToyClient, ConsensusSync };

std::string to_string(ProtocolKind p);
ProtocolKind protocol_from_string(const std::string& s);

enum class Behavior {
    Crash,        // silent from `at` onwards
    WishSpam,     // WISH with ever larger views to everyone, every rho
    RandomWish,   // WISH with arbitrary views to random subsets
    Equivocate,   // as leader: conflicting proposals; as voter: votes for every hash seen
    Withhold,     // as leader: never sends PREPREPARE or NEW_STATE
    Censor,       // as leader: never proposes values broadcast by `target`
    StaleCert,    // reports the oldest prepared certificates it knows, replays old votes
    VoteSpam,     // protocol messages for far-future views
};

std::string to_string(Behavior b);
Behavior behavior_from_string(const std::string& s);

struct FaultDirective {
    enum class Kind { Drop, Delay, Isolate, Byzantine, RandomDrift, PostGstDelay };
    Kind kind = Kind::Drop;
    double probability = 0.0;   // Drop
    Tick max_delay = 0;         // Delay
    Pid pid = 0;                // Isolate, Byzantine
    Tick until = 0;             // Isolate (effective before min(until, gst))
    Tick at = 0;                // Byzantine crash time
    Behavior behavior = Behavior::Crash;
    Pid target = 0;             // Censor
    std::int64_t min_num = 1, max_num = 1, den = 1;  // RandomDrift
    std::string mode = "uniform";                    // PostGstDelay: uniform | max
};

struct Broadcast {
    Pid pid = 0;
    Tick at = 0;
};

struct Workload {
    int per_process = 0;
    Tick window_lo = 0;
    Tick window_hi = 0;
    std::vector<Broadcast> explicit_broadcasts;
};

struct ScenarioConfig {
    std::string name;
    std::uint32_t n = 4;
    std::uint32_t f = 1;
    std::set<Pid> faulty;
    Tick gst = 0;
    Tick delta = 1;
    Tick delta_cap = 1;
    Tick rho = 1;
    Tick tau = 1;
    Tick t_broadcast = 1;
    std::uint64_t batch = 1;
    Tick init_dur_delivery = 1;
    Tick init_dur_recovery = 1;
    std::vector<Rational> drift;   // empty: rate 1 everywhere
    std::vector<Tick> start_times;  // empty: drawn from start_window
    Tick start_lo = 0;
    Tick start_hi = 0;
    std::uint64_t seed = 0;
    Tick horizon = 1;
    ProtocolKind protocol = ProtocolKind::PbftLight;
    bool latency_mode = false;
    Tick max_pre_gst_delay = 0;  // 0: use delta_cap * 4
    Tick view_duration_unit = 0;  // F(v) = v * unit, 0: delta_cap
    std::int64_t tick_ns = 1'000'000;
    TraceLevel trace_level = TraceLevel::Standard;
    std::int64_t mem_sample_every = 1;  // periodic handler invocations per MemSample
    Workload workload;
    std::vector<FaultDirective> fault_plan;
    std::vector<std::string> checks;
    std::vector<std::string> require_premises;  // checks that must not come back not-applicable
    View target_view = 0;  // toy client / rotation perpetual-rotation target
    std::optional<Tick> liveness_cutoff;

    bool is_faulty(Pid p) const { return faulty.contains(p); }
    std::uint32_t quorum() const { return 2 * f + 1; }
    Tick view_unit() const { return view_duration_unit > 0 ? view_duration_unit : delta_cap; }
    Tick pre_gst_delay_max() const { return max_pre_gst_delay > 0 ? max_pre_gst_delay : 4 * delta_cap; }
    std::vector<Behavior> behaviors_of(Pid p) const;
    std::optional<Tick> crash_time(Pid p) const;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Throws ConfigError on schema or invariant violations.
ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& c);
ScenarioConfig load_config(const std::string& path);
void validate(const ScenarioConfig& c);

}  // namespace smr
