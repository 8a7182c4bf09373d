#include "smr/sim/adversary.hpp"

#include <algorithm>

#include "smr/bft/common.hpp"

namespace smr {

namespace {

MessagePtr wrap(Message m) { return std::make_shared<const Message>(std::move(m)); }

}  // namespace

Adversary::Adversary(const ScenarioConfig& cfg, Pid self, const KeyRegistry& keys, std::uint64_t seed)
    : cfg_(cfg), self_(self), keys_(keys), signer_(keys, self), rng_(seed), behaviors_(cfg.behaviors_of(self)) {
    for (const auto& d : cfg.fault_plan)
        if (d.kind == FaultDirective::Kind::Byzantine && d.pid == self && d.behavior == Behavior::Censor)
            censor_target_ = d.target;
}

bool Adversary::has(Behavior b) const { return std::find(behaviors_.begin(), behaviors_.end(), b) != behaviors_.end(); }

Value Adversary::forged_for(View v, Pos k) {
    auto [it, fresh] = forged_.try_emplace({v, k});
    if (fresh) it->second = Value{forged_value_id(self_, forged_seq_++), true, "forged"};
    return it->second;
}

void Adversary::observe(const Message& m) {
    if (m.type != MsgType::NewLeader || !keys_.verify(m)) return;
    const auto& b = std::get<NewLeaderBody>(m.body);
    new_leaders_[b.v].try_emplace(m.signer, SignedNewLeader{b, m.signer, m.tag});
    // Only the most recent views matter.
    while (new_leaders_.size() > 4) new_leaders_.erase(new_leaders_.begin());
}

MessagePtr Adversary::equivocate(Pid to, const MessagePtr& m) {
    if (to == self_ || to % 2 == 1) return m;
    if (m->type == MsgType::PrePrepare) {
        const auto& b = std::get<ProposalBody>(m->body);
        return wrap(signer_.sign(MsgType::PrePrepare, ProposalBody{b.v, b.k, forged_for(b.v, b.k)}));
    }
    if (m->type != MsgType::NewState) return m;
    const View v = m->view();
    if (auto it = alt_new_state_[v].find(to); it != alt_new_state_[v].end()) return it->second;
    MessagePtr alt = m;
    if (std::holds_alternative<HsNewStateBody>(m->body)) {
        alt = wrap(signer_.sign(MsgType::NewState, HsNewStateBody{v, {}}));
    } else {
        const auto& known = new_leaders_[v];
        const auto q = cfg_.quorum();
        if (known.size() > q) {
            // Highest-pid quorum instead of the first to arrive.
            std::vector<SignedNewLeader> subset;
            for (auto it = known.rbegin(); it != known.rend() && subset.size() < q; ++it) subset.push_back(it->second);
            const std::uint64_t batch = cfg_.protocol == ProtocolKind::PbftLight ? 0 : cfg_.batch;
            auto nl = compute_new_log(subset, v, batch);
            alt = wrap(signer_.sign(MsgType::NewState, NewStateBody{v, as_entries(nl.log), subset}));
        }
    }
    alt_new_state_[v][to] = alt;
    while (alt_new_state_.size() > 4) alt_new_state_.erase(alt_new_state_.begin());
    return alt;
}

MessagePtr Adversary::stale_new_leader(const MessagePtr& m) {
    const auto& b = std::get<NewLeaderBody>(m->body);
    for (const auto& r : b.reports) oldest_reports_.try_emplace(r.k, r);
    NewLeaderBody stale{b.v, {}};
    for (const auto& [k, r] : oldest_reports_) stale.reports.push_back(r);
    auto s = signer_.sign_new_leader(std::move(stale));
    return wrap(Message{MsgType::NewLeader, s.signer, s.tag, std::move(s.body)});
}

void Adversary::outgoing(Pid to, const MessagePtr& m, std::vector<Out>& out) {
    MessagePtr msg = m;
    const bool proposal = m->type == MsgType::PrePrepare || m->type == MsgType::NewState;
    if (has(Behavior::Withhold) && proposal && to != self_) return;
    if (has(Behavior::Censor) && m->type == MsgType::PrePrepare) {
        const auto& b = std::get<ProposalBody>(m->body);
        if (!b.x.is_nop() && (b.x.id >> 63) == 0 && value_origin(b.x.id) == censor_target_)
            msg = wrap(signer_.sign(MsgType::PrePrepare, ProposalBody{b.v, b.k, nop_value()}));
    }
    if (has(Behavior::StaleCert)) {
        if (m->type == MsgType::NewLeader) msg = stale_new_leader(m);
        if (is_vote(m->type) && old_votes_.size() < 64 && to == self_) old_votes_.push_back(m);
    }
    if (has(Behavior::Equivocate)) {
        msg = equivocate(to, msg);
        if (is_vote(m->type) && to != self_) {
            const auto& b = std::get<VoteBody>(m->body);
            const Hash other = hash_of(forged_for(b.v, b.k));
            if (other != b.h) out.push_back({to, wrap(signer_.sign(b.kind, VoteBody{b.kind, b.v, b.k, other}))});
        }
    }
    out.push_back({to, std::move(msg)});
}

void Adversary::periodic(View current, std::vector<Out>& out) {
    const Pid n = cfg_.n;
    if (has(Behavior::WishSpam)) {
        spam_view_ = spam_view_ < (View{1} << 39) ? spam_view_ * 2 : spam_view_ + 1;
        auto m = wrap(signer_.sign(MsgType::Wish, WishBody{spam_view_}));
        for (Pid p = 1; p <= n; ++p) out.push_back({p, m});
    }
    if (has(Behavior::RandomWish)) {
        auto m = wrap(signer_.sign(MsgType::Wish, WishBody{static_cast<View>(rng_.uniform(1, current + 50))}));
        for (Pid p = 1; p <= n; ++p)
            if (rng_.chance(0.5)) out.push_back({p, m});
    }
    if (has(Behavior::VoteSpam)) {
        vote_spam_view_ = std::max(vote_spam_view_ + 1, current + 1000);
        const Hash h = rng_.next() >> 1;
        auto vote = wrap(signer_.sign(MsgType::Prepare, VoteBody{MsgType::Prepare, vote_spam_view_, 1, h}));
        auto nl = signer_.sign_new_leader(NewLeaderBody{vote_spam_view_, {}});
        auto nlm = wrap(Message{MsgType::NewLeader, nl.signer, nl.tag, std::move(nl.body)});
        for (Pid p = 1; p <= n; ++p) {
            out.push_back({p, vote});
            out.push_back({p, nlm});
        }
    }
    if (has(Behavior::StaleCert) && !old_votes_.empty()) {
        for (int i = 0; i < 4; ++i) {
            const auto& m = old_votes_[rng_.uniform(0, static_cast<std::int64_t>(old_votes_.size()) - 1)];
            for (Pid p = 1; p <= n; ++p) out.push_back({p, m});
        }
    }
}

}  // namespace smr
