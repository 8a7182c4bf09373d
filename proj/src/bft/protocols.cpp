#include <algorithm>

#include "smr/bft/replica.hpp"

namespace smr {

// ---- PbftLight ----

void PbftLight::handle_broadcast(const Value& x) {
    if (!x.valid || x.is_nop() || delivered(x)) return;
    if (status_ != Status::Normal) {
        pending_broadcasts_[x.id] = x;
        return;
    }
    const TimerId t{TimerKind::Delivery, x.id};
    if (env_.timer_active(t)) return;
    env_.start_timer(t, dur_delivery_);
    env_.send(leader_of(curr_view_, p_.n), env_.signer().sign(MsgType::Forward, ValueBody{x}));
}

void PbftLight::handle_forward(const Value& x) {
    if (!x.valid || x.is_nop() || delivered(x)) return;
    if (!is_leader() || status_ != Status::Normal) {
        pending_forwards_[x.id] = x;
        return;
    }
    if (in_log(x) || proposed_.contains(x.id)) return;
    env_.send_all(env_.signer().sign(MsgType::PrePrepare, ProposalBody{curr_view_, next_, x}));
    proposed_.insert(x.id);
    ++next_;
}

bool PbftLight::retry_pending() {
    if (status_ != Status::Normal) return false;
    bool progress = false;
    if (!pending_broadcasts_.empty()) {
        auto b = std::move(pending_broadcasts_);
        pending_broadcasts_.clear();
        for (const auto& [id, x] : b) handle_broadcast(x);
        progress = true;
    }
    if (is_leader() && !pending_forwards_.empty()) {
        auto f = std::move(pending_forwards_);
        pending_forwards_.clear();
        for (const auto& [id, x] : f) handle_forward(x);
        progress = true;
    }
    return progress;
}

void PbftLight::after_deliver(const Value& x) {
    if (!x.is_nop()) {
        env_.stop_timer({TimerKind::Delivery, x.id});
        pending_broadcasts_.erase(x.id);
        pending_forwards_.erase(x.id);
    }
    if (status_ == Status::Normal && last_delivered_ == init_log_length_) env_.stop_timer(kRecovery);
}

void PbftLight::begin_view(View v) {
    if (!one_shot_view()) {
        ReplicaCore::begin_view(v);
        return;
    }
    // Nothing can have been prepared before view 1: skip the NEW_LEADER round.
    env_.start_timer(kRecovery, dur_recovery_);
    if (is_leader()) {
        next_ = 1;
        new_state_sent_ = true;
        env_.send_all(env_.signer().sign(MsgType::NewState, NewStateBody{1, {}, {}}));
    }
}

void PbftLight::on_new_leader_quorum(const std::vector<SignedNewLeader>& m) {
    auto nl = compute_new_log(m, curr_view_, 0);
    next_ = nl.next;
    env_.send_all(env_.signer().sign(MsgType::NewState, NewStateBody{curr_view_, as_entries(nl.log), m}));
}

void PbftLight::handle_new_state(const Message& m) {
    const auto* b = std::get_if<NewStateBody>(&m.body);
    if (!b || b->v != curr_view_ || m.signer != leader_of(b->v, p_.n)) return;
    if (one_shot_view()) {
        if (!b->log.empty() || !b->proof.empty()) return;
    } else {
        if (!quorum_of_new_leaders(b->proof, b->v)) return;
        if (as_entries(compute_new_log(b->proof, b->v, 0).log) != b->log) return;
    }
    set_log(b->log);
    send_prepares_for_log();
    status_ = Status::Normal;
    init_log_length_ = b->log.empty() ? 0 : b->log.back().first;
    if (init_log_length_ <= last_delivered_) env_.stop_timer(kRecovery);
}

// ---- PbftRotation ----

void PbftRotation::handle_broadcast(const Value& x) {
    if (!x.valid || x.is_nop() || delivered(x)) return;
    if (std::any_of(queue_.begin(), queue_.end(), [&](const Value& y) { return y.id == x.id; })) return;
    queue_.push_back(x);
}

void PbftRotation::propagate(const Value& x) {
    env_.send_all(env_.signer().sign(MsgType::PrePrepare, ProposalBody{curr_view_, next_, x}));
    if (!x.is_nop()) proposed_.insert(x.id);
    ++next_;
    if (next_ <= curr_view_ * p_.batch) env_.start_timer(kBroadcastTimer, p_.t_broadcast);
}

bool PbftRotation::leader_step() {
    if (status_ != Status::Normal || !is_leader() || next_ > curr_view_ * p_.batch) return false;
    for (const auto& x : queue_) {
        if (in_log(x) || proposed_.contains(x.id)) continue;
        env_.stop_timer(kBroadcastTimer);
        propagate(x);
        return true;
    }
    return false;
}

void PbftRotation::on_broadcast_timer() {
    if (is_leader() && next_ <= curr_view_ * p_.batch) propagate(nop_value());
}

void PbftRotation::after_deliver(const Value& x) {
    if (!x.is_nop())
        std::erase_if(queue_, [&](const Value& y) { return y.id == x.id; });
    if (status_ != Status::Normal || curr_view_ == 0) return;
    if (last_delivered_ == curr_view_ * p_.batch) {
        env_.stop_all_timers();
        env_.advance(AdvanceCause::Batch);
        status_ = Status::Advanced;
    } else if (last_delivered_ > (curr_view_ - 1) * p_.batch) {
        env_.stop_timer(kDelivery);
        env_.start_timer(kDelivery, dur_delivery_);
    }
}

void PbftRotation::on_new_leader_quorum(const std::vector<SignedNewLeader>& m) {
    auto nl = compute_new_log(m, curr_view_, p_.batch);
    next_ = nl.next;
    env_.send_all(env_.signer().sign(MsgType::NewState, NewStateBody{curr_view_, as_entries(nl.log), m}));
    env_.start_timer(kBroadcastTimer, p_.t_broadcast);
}

void PbftRotation::handle_new_state(const Message& m) {
    const auto* b = std::get_if<NewStateBody>(&m.body);
    if (!b || b->v != curr_view_ || m.signer != leader_of(b->v, p_.n)) return;
    if (!quorum_of_new_leaders(b->proof, b->v)) return;
    if (as_entries(compute_new_log(b->proof, b->v, p_.batch).log) != b->log) return;
    env_.stop_timer(kRecovery);
    set_log(b->log);
    enter_batch(b->v);
}

void PbftRotation::enter_batch(View v) {
    if (last_delivered_ >= v * p_.batch) {
        env_.advance(AdvanceCause::BatchAtInit);
        status_ = Status::Advanced;
        return;
    }
    send_prepares_for_log();
    env_.start_timer(kDelivery, dur_delivery_);
    status_ = Status::Normal;
}

// ---- HotstuffLight ----

bool HotstuffLight::lock_allows(const Slot& local, const Value& x, View cert_view) {
    if (cert_view > local.lock_view) return true;
    return local.lock_log && *local.lock_log == x && cert_view >= local.lock_view;
}

void HotstuffLight::on_new_leader_quorum(const std::vector<SignedNewLeader>& m) {
    HsNewStateBody b{curr_view_, {}};
    for (const auto& [k, s] : select_highest(m)) b.entries.push_back({k, s.prep_view, s.x, *s.cert});
    next_ = (curr_view_ - 1) * p_.batch + 1;
    env_.send_all(env_.signer().sign(MsgType::NewState, std::move(b)));
    env_.start_timer(kBroadcastTimer, p_.t_broadcast);
}

bool HotstuffLight::valid_new_state(const Message& m) const {
    const auto* b = std::get_if<HsNewStateBody>(&m.body);
    if (!b || b->v != curr_view_ || m.signer != leader_of(b->v, p_.n)) return false;
    std::set<Pos> covered;
    Pos prev = 0;
    for (const auto& e : b->entries) {
        if (e.k <= prev || e.prep_view == 0 || e.prep_view >= b->v) return false;
        prev = e.k;
        if (!check_prepared(env_.keys(), e.cert, e.prep_view, e.k, hash_of(e.x), p_.quorum())) return false;
        if (const Slot* s = slot(e.k); s && s->lock_view > 0 && !lock_allows(*s, e.x, e.prep_view)) return false;
        covered.insert(e.k);
    }
    for (const auto& [k, s] : slots_)
        if (s.lock_view > 0 && !covered.contains(k)) return false;
    return true;
}

void HotstuffLight::handle_new_state(const Message& m) {
    if (!valid_new_state(m)) return;
    const auto& b = std::get<HsNewStateBody>(m.body);
    env_.stop_timer(kRecovery);
    std::map<Pos, Selected> sel;
    for (const auto& e : b.entries) sel[e.k] = Selected{e.x, e.prep_view, &e.cert};
    set_log(as_entries(fill_log(sel, (b.v - 1) * p_.batch + 1)));
    enter_batch(b.v);
}

}  // namespace smr
