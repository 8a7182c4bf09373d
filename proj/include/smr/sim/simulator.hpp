#pragma once

#include <memory>

#include "smr/config.hpp"
#include "smr/protocol.hpp"
#include "smr/sync/synchronizer.hpp"
#include "smr/trace.hpp"

namespace smr {

struct RunStats {
    std::uint64_t events = 0;
    std::uint64_t messages_sent = 0;
    std::uint64_t messages_dropped = 0;
};

// Deterministic discrete-event run of one scenario. Same config and seed
// give the same trace.
class Simulator {
public:
    explicit Simulator(const ScenarioConfig& cfg);
    ~Simulator();
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    void run();  // up to and including the horizon
    void run_until(Tick t);
    Tick now() const;

    const Trace& trace() const;
    Trace take_trace();
    const RunStats& stats() const;

    Protocol& protocol(Pid p);
    const Synchronizer& synchronizer(Pid p) const;
    Tick start_time(Pid p) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Trace run_scenario(const ScenarioConfig& cfg);

}  // namespace smr
