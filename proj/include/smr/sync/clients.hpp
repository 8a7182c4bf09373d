#pragma once

#include "smr/protocol.hpp"

namespace smr {

// Minimal client that keeps requesting new views: advance on start and on
// every timer expiry, restart a tau timer on each new view.
class ToyClient : public Protocol {
public:
    ToyClient(const ReplicaParams& p, Env& env) : tau_(p.tau), env_(env) {}

    void start() override { env_.advance(AdvanceCause::Start); }
    void on_new_view(View) override {
        env_.stop_timer(kTimer);
        env_.start_timer(kTimer, tau_);
    }
    void on_message(Pid, const Message&) override {}
    void on_timer(TimerId) override { env_.advance(AdvanceCause::Timer); }

private:
    static constexpr TimerId kTimer{TimerKind::Toy, 0};
    Tick tau_;
    Env& env_;
};

using DurationFn = Tick (*)(View v, Tick unit);
inline Tick linear_duration(View v, Tick unit) { return static_cast<Tick>(v) * unit; }

// Consensus synchronizer: emits views on its own, each lasting F(v) locally.
class ConsensusSync : public Protocol {
public:
    ConsensusSync(const ReplicaParams& p, Env& env, DurationFn fn = linear_duration)
        : unit_(p.view_unit), fn_(fn), env_(env) {}

    void start() override {
        if (started_ || last_view_ > 0) return;
        started_ = true;
        env_.advance(AdvanceCause::Start);
    }
    void on_new_view(View v) override {
        last_view_ = v;
        env_.stop_timer(kTimer);
        env_.start_timer(kTimer, fn_(v, unit_));
        env_.consensus_view(v);
    }
    void on_message(Pid, const Message&) override {}
    void on_timer(TimerId) override { env_.advance(AdvanceCause::Timer); }

    Tick duration(View v) const { return fn_(v, unit_); }

private:
    static constexpr TimerId kTimer{TimerKind::View, 0};
    Tick unit_;
    DurationFn fn_;
    Env& env_;
    bool started_ = false;
    View last_view_ = 0;
};

}  // namespace smr
