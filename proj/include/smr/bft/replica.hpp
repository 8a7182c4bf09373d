#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "smr/bft/common.hpp"
#include "smr/protocol.hpp"

namespace smr {

// State and handlers shared by PBFT-light, PBFT-rotation and HotStuff-light.
// Subclasses supply the client path, view initialization and the reaction to
// deliveries.
class ReplicaCore : public Protocol {
public:
    enum class Status { Normal, Initializing, Advanced };
    enum class Phase { Start, Preprepared, Prepared, Precommitted, Committed };

    struct Slot {
        std::optional<Value> log;
        std::optional<Value> prep_log;
        std::optional<Value> commit_log;
        std::optional<Value> lock_log;
        Phase phase = Phase::Start;
        View prep_view = 0;
        View lock_view = 0;
        std::optional<Certificate> cert;
    };

    ReplicaCore(const ReplicaParams& p, Env& env);

    void start() override;
    void on_new_view(View v) override;
    void on_message(Pid from, const Message& m) override;
    void on_timer(TimerId id) override;
    void on_periodic() override;
    void broadcast(const Value& x) override;
    std::size_t buffer_slots() const override { return future_.slots(); }
    std::size_t buffered_messages() const override { return future_.messages(); }

    View curr_view() const { return curr_view_; }
    Status status() const { return status_; }
    Pos last_delivered() const { return last_delivered_; }
    Pos next() const { return next_; }
    Tick dur_delivery() const { return dur_delivery_; }
    Tick dur_recovery() const { return dur_recovery_; }
    const Slot* slot(Pos k) const;
    const FutureBuffer& future() const { return future_; }

protected:
    static constexpr TimerId kRecovery{TimerKind::Recovery, 0};
    static constexpr TimerId kBroadcastTimer{TimerKind::Broadcast, 0};

    bool is_leader() const { return curr_view_ > 0 && leader_of(curr_view_, p_.n) == env_.self(); }
    bool in_log(const Value& x) const;
    bool delivered(const Value& x) const { return !x.is_nop() && delivered_ids_.contains(x.id); }
    void set_log(const std::vector<std::pair<Pos, Value>>& entries);
    void write_log(Pos k, const Value& x);
    void send_vote(MsgType kind, Pos k, Hash h);
    void send_prepares_for_log();
    void timeout_advance();
    void grow(Tick& dur, Tick cap);
    void record_timeouts();
    NewLeaderBody new_leader_body() const;
    bool quorum_of_new_leaders(const std::vector<SignedNewLeader>& m, View v) const;

    // Hooks.
    virtual void handle_broadcast(const Value& x) = 0;
    virtual void handle_forward(const Value&) {}
    virtual bool proposal_in_range(View, Pos) const { return true; }
    virtual MsgType after_prepare() const { return MsgType::Commit; }
    virtual bool deliver_allowed() const { return true; }
    virtual void after_deliver(const Value& x) = 0;
    virtual void begin_view(View v);
    virtual void on_new_leader_quorum(const std::vector<SignedNewLeader>& m) = 0;
    virtual void handle_new_state(const Message& m) = 0;
    virtual void on_broadcast_timer() {}
    virtual bool retry_pending() { return false; }
    virtual bool leader_step() { return false; }
    virtual Tick delivery_cap() const = 0;
    virtual Tick recovery_cap() const = 0;

    void drain();

    ReplicaParams p_;
    Env& env_;
    View curr_view_ = 0;
    Status status_ = Status::Initializing;
    std::map<Pos, Slot> slots_;
    std::map<std::uint64_t, Pos> log_index_;  // non-nop value id -> position in log
    Pos last_delivered_ = 0;
    Pos init_log_length_ = 0;
    Pos next_ = 1;
    Tick dur_delivery_;
    Tick dur_recovery_;
    VoteStore votes_;
    FutureBuffer future_;
    std::set<Pos> dirty_;
    std::set<std::uint64_t> delivered_ids_;
    std::set<std::uint64_t> proposed_;
    std::vector<SignedNewLeader> new_leaders_;
    bool new_state_sent_ = false;
    std::vector<Message> pending_proposals_;
    std::map<std::uint64_t, Value> own_broadcasts_;
    std::map<Pos, DecisionEntry> decisions_;

private:
    void dispatch_current(Pid from, const Message& m);
    void handle_decision(const DecisionBody& d);
    bool accept_proposal(const Message& m);
    bool retry_proposals();
    bool process_dirty();
    bool step_slot(Pos k);
    void commit(Pos k, Slot& s, const Certificate& c);
    bool deliver_loop();
    bool try_new_leader_quorum();

    MessagePtr decision_bundle_;
    bool bundle_stale_ = true;
};

// Single-leader PBFT: per-value delivery timers, FORWARD to the leader.
class PbftLight : public ReplicaCore {
public:
    PbftLight(const ReplicaParams& p, Env& env) : ReplicaCore(p, env) {}

protected:
    void handle_broadcast(const Value& x) override;
    void handle_forward(const Value& x) override;
    void after_deliver(const Value& x) override;
    void begin_view(View v) override;
    void on_new_leader_quorum(const std::vector<SignedNewLeader>& m) override;
    void handle_new_state(const Message& m) override;
    bool retry_pending() override;
    Tick delivery_cap() const override { return 4 * p_.delta_cap; }
    Tick recovery_cap() const override { return 6 * p_.delta_cap; }

private:
    bool one_shot_view() const { return p_.latency_mode && curr_view_ == 1; }
    std::map<std::uint64_t, Value> pending_broadcasts_;
    std::map<std::uint64_t, Value> pending_forwards_;
};

// Leader rotation: each view fills B positions from a FIFO queue, nop on a T timer.
class PbftRotation : public ReplicaCore {
public:
    PbftRotation(const ReplicaParams& p, Env& env) : ReplicaCore(p, env) {}

    const std::deque<Value>& queue() const { return queue_; }

protected:
    static constexpr TimerId kDelivery{TimerKind::Delivery, 0};

    void handle_broadcast(const Value& x) override;
    bool proposal_in_range(View v, Pos k) const override { return k <= v * p_.batch; }
    void after_deliver(const Value& x) override;
    void on_new_leader_quorum(const std::vector<SignedNewLeader>& m) override;
    void handle_new_state(const Message& m) override;
    void on_broadcast_timer() override;
    bool leader_step() override;
    Tick delivery_cap() const override { return std::max(4 * p_.delta_cap, p_.t_broadcast + 3 * p_.delta_cap); }
    Tick recovery_cap() const override { return 4 * p_.delta_cap; }

    void propagate(const Value& x);
    void enter_batch(View v);  // after adopting a NEW_STATE

    std::deque<Value> queue_;
};

// Rotation plus a PRECOMMIT phase and per-position locks.
class HotstuffLight : public PbftRotation {
public:
    HotstuffLight(const ReplicaParams& p, Env& env) : PbftRotation(p, env) {}

    // Lock rule for one proposed entry against the local lock.
    static bool lock_allows(const Slot& local, const Value& x, View cert_view);

protected:
    MsgType after_prepare() const override { return MsgType::PreCommit; }
    bool deliver_allowed() const override { return status_ == Status::Normal; }
    void on_new_leader_quorum(const std::vector<SignedNewLeader>& m) override;
    void handle_new_state(const Message& m) override;
    Tick delivery_cap() const override { return std::max(5 * p_.delta_cap, p_.t_broadcast + 4 * p_.delta_cap); }

private:
    bool valid_new_state(const Message& m) const;
};

}  // namespace smr
