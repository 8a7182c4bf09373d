#include "smr/sim/network.hpp"

#include <algorithm>

namespace smr {

Network::Network(const ScenarioConfig& cfg, std::uint64_t seed) : cfg_(&cfg), rng_(seed) {
    pre_gst_max_ = cfg.pre_gst_delay_max();
    for (const auto& d : cfg.fault_plan) {
        switch (d.kind) {
            case FaultDirective::Kind::Drop: drop_prob_ = d.probability; break;
            case FaultDirective::Kind::Delay: pre_gst_max_ = std::max<Tick>(1, d.max_delay); break;
            case FaultDirective::Kind::PostGstDelay: post_gst_max_ = d.mode == "max"; break;
            default: break;
        }
    }
}

bool Network::isolated(Pid p, Tick t) const {
    for (const auto& d : cfg_->fault_plan)
        if (d.kind == FaultDirective::Kind::Isolate && d.pid == p && t < std::min(d.until, cfg_->gst)) return true;
    return false;
}

std::optional<Tick> Network::deliver_time(Tick send_time, Pid from, Pid to) {
    if (from == to) return send_time;
    if (send_time >= cfg_->gst) {
        if (post_gst_max_) return send_time + cfg_->delta;
        return send_time + rng_.uniform(1, cfg_->delta);
    }
    if (isolated(from, send_time) || isolated(to, send_time)) return std::nullopt;
    if (rng_.chance(drop_prob_)) return std::nullopt;
    return send_time + rng_.uniform(1, pre_gst_max_);
}

}  // namespace smr
