#include "smr/bft/replica.hpp"

#include <algorithm>

namespace smr {

namespace {

bool well_formed(const Message& m) {
    switch (m.type) {
        case MsgType::Wish: return std::holds_alternative<WishBody>(m.body);
        case MsgType::Broadcast:
        case MsgType::Forward: return std::holds_alternative<ValueBody>(m.body);
        case MsgType::PrePrepare: return std::holds_alternative<ProposalBody>(m.body);
        case MsgType::Prepare:
        case MsgType::PreCommit:
        case MsgType::Commit: {
            auto* v = std::get_if<VoteBody>(&m.body);
            return v && v->kind == m.type;
        }
        case MsgType::Decision: return std::holds_alternative<DecisionBody>(m.body);
        case MsgType::NewLeader: return std::holds_alternative<NewLeaderBody>(m.body);
        case MsgType::NewState:
            return std::holds_alternative<NewStateBody>(m.body) || std::holds_alternative<HsNewStateBody>(m.body);
    }
    return false;
}

}  // namespace

ReplicaCore::ReplicaCore(const ReplicaParams& p, Env& env)
    : p_(p), env_(env), dur_delivery_(p.init_dur_delivery), dur_recovery_(p.init_dur_recovery) {}

const ReplicaCore::Slot* ReplicaCore::slot(Pos k) const {
    auto it = slots_.find(k);
    return it == slots_.end() ? nullptr : &it->second;
}

bool ReplicaCore::in_log(const Value& x) const { return !x.is_nop() && log_index_.contains(x.id); }

void ReplicaCore::write_log(Pos k, const Value& x) {
    auto& s = slots_[k];
    if (s.log && !s.log->is_nop()) log_index_.erase(s.log->id);
    s.log = x;
    if (!x.is_nop()) log_index_[x.id] = k;
}

void ReplicaCore::set_log(const std::vector<std::pair<Pos, Value>>& entries) {
    log_index_.clear();
    for (auto& [k, s] : slots_) {
        s.log.reset();
        s.phase = Phase::Start;
    }
    for (const auto& [k, x] : entries) {
        auto& s = slots_[k];
        s.log = x;
        s.phase = Phase::Preprepared;
        if (!x.is_nop()) log_index_[x.id] = k;
    }
}

void ReplicaCore::send_vote(MsgType kind, Pos k, Hash h) {
    env_.send_all(env_.signer().sign(kind, VoteBody{kind, curr_view_, k, h}));
}

void ReplicaCore::send_prepares_for_log() {
    for (const auto& [k, s] : slots_) {
        if (s.phase != Phase::Preprepared || !s.log) continue;
        send_vote(MsgType::Prepare, k, hash_of(*s.log));
        dirty_.insert(k);
    }
}

void ReplicaCore::grow(Tick& dur, Tick cap) {
    if (!p_.latency_mode)
        dur += p_.tau;
    else if (dur < cap)
        dur = std::min(dur + p_.tau, cap);
}

void ReplicaCore::record_timeouts() {
    TraceEvent e;
    e.kind = EventKind::Timeouts;
    e.v = curr_view_;
    e.a = dur_delivery_;
    e.b = dur_recovery_;
    env_.record(std::move(e));
}

void ReplicaCore::timeout_advance() {
    env_.stop_all_timers();
    env_.advance(AdvanceCause::Timer);
    status_ = Status::Advanced;
    grow(dur_delivery_, delivery_cap());
    grow(dur_recovery_, recovery_cap());
    record_timeouts();
}

NewLeaderBody ReplicaCore::new_leader_body() const {
    NewLeaderBody b{curr_view_, {}};
    for (const auto& [k, s] : slots_)
        if (s.prep_view > 0 && s.prep_log && s.cert) b.reports.push_back({k, s.prep_view, *s.prep_log, *s.cert});
    return b;
}

bool ReplicaCore::quorum_of_new_leaders(const std::vector<SignedNewLeader>& m, View v) const {
    std::set<Pid> signers;
    for (const auto& nl : m) {
        if (!valid_new_leader(env_.keys(), nl, v, p_.quorum())) return false;
        if (!signers.insert(nl.signer).second) return false;
    }
    return signers.size() >= p_.quorum();
}

void ReplicaCore::start() {
    record_timeouts();
    if (curr_view_ == 0) env_.advance(AdvanceCause::Start);
}

void ReplicaCore::begin_view(View v) {
    auto nl = env_.signer().sign_new_leader(new_leader_body());
    env_.send(leader_of(v, p_.n), Message{MsgType::NewLeader, nl.signer, nl.tag, std::move(nl.body)});
    env_.start_timer(kRecovery, dur_recovery_);
}

void ReplicaCore::on_new_view(View v) {
    env_.stop_all_timers();
    curr_view_ = v;
    status_ = Status::Initializing;
    votes_.reset();
    dirty_.clear();
    pending_proposals_.clear();
    new_leaders_.clear();
    new_state_sent_ = false;
    proposed_.clear();
    begin_view(v);
    for (auto& [from, m] : future_.take(v)) dispatch_current(from, m);
    drain();
}

void ReplicaCore::on_message(Pid from, const Message& m) {
    if (!well_formed(m) || !env_.keys().verify(m)) return;
    switch (m.type) {
        case MsgType::Wish: return;
        case MsgType::Broadcast: handle_broadcast(std::get<ValueBody>(m.body).x); break;
        case MsgType::Forward: handle_forward(std::get<ValueBody>(m.body).x); break;
        case MsgType::Decision: handle_decision(std::get<DecisionBody>(m.body)); break;
        default: {
            const View v = m.view();
            if (v < curr_view_) return;
            if (v > curr_view_) {
                future_.add(from, m, curr_view_);
                return;
            }
            dispatch_current(from, m);
        }
    }
    drain();
}

void ReplicaCore::dispatch_current(Pid, const Message& m) {
    switch (m.type) {
        case MsgType::PrePrepare: pending_proposals_.push_back(m); break;
        case MsgType::Prepare:
        case MsgType::PreCommit:
        case MsgType::Commit: {
            const auto& b = std::get<VoteBody>(m.body);
            if (votes_.add(SignedVote{b, m.signer, m.tag})) dirty_.insert(b.k);
            break;
        }
        case MsgType::NewLeader: {
            if (!is_leader()) return;
            for (const auto& nl : new_leaders_)
                if (nl.signer == m.signer) return;
            SignedNewLeader nl{std::get<NewLeaderBody>(m.body), m.signer, m.tag};
            if (valid_new_leader(env_.keys(), nl, curr_view_, p_.quorum())) new_leaders_.push_back(std::move(nl));
            break;
        }
        case MsgType::NewState:
            if (status_ == Status::Initializing) handle_new_state(m);
            break;
        default: break;
    }
}

void ReplicaCore::handle_decision(const DecisionBody& d) {
    for (const auto& e : d.entries) {
        if (e.k == 0 || e.cert.k != e.k) continue;
        if (const Slot* s = slot(e.k); s && s->commit_log) continue;
        if (!check_committed(env_.keys(), e.cert, e.cert.v, e.k, hash_of(e.x), p_.quorum())) continue;
        slots_[e.k].commit_log = e.x;
        decisions_[e.k] = e;
        bundle_stale_ = true;
        env_.record(cert_event(e.cert));
    }
}

bool ReplicaCore::accept_proposal(const Message& m) {
    const auto& b = std::get<ProposalBody>(m.body);
    if (m.signer != leader_of(b.v, p_.n) || b.v != curr_view_ || status_ != Status::Normal) return false;
    if (b.k == 0 || !proposal_in_range(b.v, b.k)) return false;
    if (const Slot* s = slot(b.k); s && s->phase != Phase::Start) return false;
    if (!b.x.valid || in_log(b.x)) return false;
    write_log(b.k, b.x);
    slots_[b.k].phase = Phase::Preprepared;
    send_vote(MsgType::Prepare, b.k, hash_of(b.x));
    dirty_.insert(b.k);
    return true;
}

bool ReplicaCore::retry_proposals() {
    if (pending_proposals_.empty() || status_ == Status::Initializing) return false;
    auto pending = std::move(pending_proposals_);
    pending_proposals_.clear();
    bool progress = false;
    if (status_ == Status::Normal)
        for (const auto& m : pending) progress |= accept_proposal(m);
    return progress;
}

bool ReplicaCore::step_slot(Pos k) {
    auto it = slots_.find(k);
    if (it == slots_.end()) return false;
    Slot& s = it->second;
    const auto q = p_.quorum();
    if (s.phase == Phase::Preprepared && s.log) {
        const Hash h = hash_of(*s.log);
        auto c = votes_.quorum(MsgType::Prepare, k, h, q);
        if (!c) return false;
        s.prep_log = s.log;
        s.prep_view = curr_view_;
        s.phase = Phase::Prepared;
        env_.record(cert_event(*c));
        s.cert = std::move(c);
        send_vote(after_prepare(), k, h);
        return true;
    }
    if (s.phase == Phase::Prepared && after_prepare() == MsgType::PreCommit && s.prep_log) {
        const Hash h = hash_of(*s.prep_log);
        auto c = votes_.quorum(MsgType::PreCommit, k, h, q);
        if (!c) return false;
        s.lock_view = curr_view_;
        s.lock_log = s.prep_log;
        s.phase = Phase::Precommitted;
        env_.record(cert_event(*c));
        TraceEvent lock;
        lock.kind = EventKind::LockSet;
        lock.v = s.lock_view;
        lock.k = k;
        lock.h = h;
        env_.record(std::move(lock));
        send_vote(MsgType::Commit, k, h);
        return true;
    }
    const Phase ready = after_prepare() == MsgType::PreCommit ? Phase::Precommitted : Phase::Prepared;
    if (s.phase == ready && s.prep_log) {
        const Hash h = hash_of(*s.prep_log);
        auto c = votes_.quorum(MsgType::Commit, k, h, q);
        if (!c) return false;
        commit(k, s, *c);
        return true;
    }
    return false;
}

void ReplicaCore::commit(Pos k, Slot& s, const Certificate& c) {
    const bool fresh = !s.commit_log;
    s.commit_log = s.log;
    s.phase = Phase::Committed;
    env_.record(cert_event(c));
    if (!fresh) return;
    DecisionEntry e{*s.log, k, c};
    decisions_[k] = e;
    bundle_stale_ = true;
    env_.send_all(env_.signer().sign(MsgType::Decision, DecisionBody{{std::move(e)}}));
}

bool ReplicaCore::process_dirty() {
    bool progress = false;
    while (!dirty_.empty()) {
        const Pos k = *dirty_.begin();
        dirty_.erase(dirty_.begin());
        if (status_ != Status::Normal) continue;
        if (step_slot(k)) {
            progress = true;
            dirty_.insert(k);
        }
    }
    return progress;
}

bool ReplicaCore::deliver_loop() {
    bool progress = false;
    while (deliver_allowed()) {
        auto it = slots_.find(last_delivered_ + 1);
        if (it == slots_.end() || !it->second.commit_log) break;
        ++last_delivered_;
        const Value x = *it->second.commit_log;
        if (!x.is_nop()) {
            delivered_ids_.insert(x.id);
            own_broadcasts_.erase(x.id);
        }
        env_.deliver(x, last_delivered_);
        after_deliver(x);
        progress = true;
    }
    return progress;
}

bool ReplicaCore::try_new_leader_quorum() {
    if (status_ != Status::Initializing || !is_leader() || new_state_sent_ || new_leaders_.size() < p_.quorum())
        return false;
    new_state_sent_ = true;
    std::vector<SignedNewLeader> m(new_leaders_.begin(), new_leaders_.begin() + p_.quorum());
    on_new_leader_quorum(m);
    return true;
}

void ReplicaCore::drain() {
    for (;;) {
        bool progress = false;
        progress |= retry_proposals();
        progress |= retry_pending();
        progress |= process_dirty();
        progress |= deliver_loop();
        progress |= leader_step();
        progress |= try_new_leader_quorum();
        if (!progress) break;
    }
}

void ReplicaCore::on_timer(TimerId id) {
    if (id.kind == TimerKind::Broadcast)
        on_broadcast_timer();
    else
        timeout_advance();
    drain();
}

void ReplicaCore::on_periodic() {
    for (const auto& [id, x] : own_broadcasts_) env_.send_all(env_.signer().sign(MsgType::Broadcast, ValueBody{x}));
    if (decisions_.empty()) return;
    if (bundle_stale_) {
        DecisionBody b;
        b.entries.reserve(decisions_.size());
        for (const auto& [k, e] : decisions_) b.entries.push_back(e);
        decision_bundle_ = std::make_shared<const Message>(env_.signer().sign(MsgType::Decision, std::move(b)));
        bundle_stale_ = false;
    }
    for (Pid p = 1; p <= p_.n; ++p)
        if (p != env_.self()) env_.send(p, decision_bundle_);
}

void ReplicaCore::broadcast(const Value& x) {
    own_broadcasts_[x.id] = x;
    env_.send_all(env_.signer().sign(MsgType::Broadcast, ValueBody{x}));
}

}  // namespace smr
