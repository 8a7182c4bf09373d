#pragma once

#include <optional>

#include "smr/config.hpp"
#include "smr/sim/rng.hpp"

namespace smr {

// Partially synchronous link model. Post-GST sends between distinct processes
// arrive within [1, delta]; pre-GST sends may be dropped or delayed.
class Network {
public:
    Network(const ScenarioConfig& cfg, std::uint64_t seed);

    // nullopt means the message is lost.
    std::optional<Tick> deliver_time(Tick send_time, Pid from, Pid to);

private:
    bool isolated(Pid p, Tick t) const;

    const ScenarioConfig* cfg_;
    Rng rng_;
    double drop_prob_ = 0.0;
    Tick pre_gst_max_ = 1;
    bool post_gst_max_ = false;
};

}  // namespace smr
