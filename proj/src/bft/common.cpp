#include "smr/bft/common.hpp"

#include <algorithm>
#include <set>

namespace smr {

bool check_cert(const KeyRegistry& keys, const Certificate& c, MsgType kind, View v, Pos k, Hash h,
                std::uint32_t quorum) {
    if (c.kind != kind || c.v != v || c.k != k || c.h != h) return false;
    std::set<Pid> signers;
    for (const auto& sv : c.votes) {
        const VoteBody want{kind, v, k, h};
        if (!(sv.body == want)) return false;
        if (!keys.verify(sv)) return false;
        if (!signers.insert(sv.signer).second) return false;
    }
    return signers.size() >= quorum;
}

std::vector<Pid> cert_signers(const Certificate& c) {
    std::vector<Pid> out;
    for (const auto& sv : c.votes) out.push_back(sv.signer);
    std::sort(out.begin(), out.end());
    return out;
}

TraceEvent cert_event(const Certificate& c) {
    TraceEvent e;
    e.kind = EventKind::CertAccepted;
    e.label = to_string(c.kind);
    e.v = c.v;
    e.k = c.k;
    e.h = c.h;
    e.signers = cert_signers(c);
    return e;
}

bool VoteStore::add(const SignedVote& sv) {
    auto& by_signer = votes_[{sv.body.kind, sv.body.k, sv.body.h}];
    return by_signer.emplace(sv.signer, sv).second;
}

std::optional<Certificate> VoteStore::quorum(MsgType kind, Pos k, Hash h, std::uint32_t q) const {
    auto it = votes_.find({kind, k, h});
    if (it == votes_.end() || it->second.size() < q) return std::nullopt;
    Certificate c{kind, it->second.begin()->second.body.v, k, h, {}};
    for (const auto& [pid, sv] : it->second) {
        if (c.votes.size() == q) break;
        c.votes.push_back(sv);
    }
    return c;
}

std::vector<Hash> VoteStore::hashes_with_quorum(MsgType kind, Pos k, std::uint32_t q) const {
    std::vector<Hash> out;
    for (auto it = votes_.lower_bound({kind, k, 0}); it != votes_.end(); ++it) {
        const auto& [key, by_signer] = *it;
        if (std::get<0>(key) != kind || std::get<1>(key) != k) break;
        if (by_signer.size() >= q) out.push_back(std::get<2>(key));
    }
    return out;
}

void FutureBuffer::add(Pid from, const Message& m, View current_view) {
    const View v = m.view();
    if (v <= current_view) return;
    auto& slot = slots_[{m.type, from}];
    if (v < slot.v) return;
    if (v > slot.v) {
        slot.v = v;
        slot.msgs.clear();
    }
    slot.msgs.insert_or_assign(m.position(), m);
}

std::vector<std::pair<Pid, Message>> FutureBuffer::take(View v) {
    std::vector<std::pair<Pid, Message>> out;
    for (auto it = slots_.begin(); it != slots_.end();) {
        if (it->second.v > v) {
            ++it;
            continue;
        }
        if (it->second.v == v)
            for (auto& [k, m] : it->second.msgs) out.emplace_back(it->first.second, std::move(m));
        it = slots_.erase(it);
    }
    // NEW_STATE and PREPREPARE before votes, and NEW_LEADER before both
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        auto rank = [](MsgType t) {
            switch (t) {
                case MsgType::NewLeader: return 0;
                case MsgType::NewState: return 1;
                case MsgType::PrePrepare: return 2;
                default: return 3;
            }
        };
        return rank(a.second.type) < rank(b.second.type);
    });
    return out;
}

std::size_t FutureBuffer::messages() const {
    std::size_t total = 0;
    for (const auto& [key, slot] : slots_) total += slot.msgs.size();
    return total;
}

std::optional<View> FutureBuffer::slot_view(MsgType t, Pid from) const {
    auto it = slots_.find({t, from});
    if (it == slots_.end()) return std::nullopt;
    return it->second.v;
}

std::map<Pos, Selected> select_highest(const std::vector<SignedNewLeader>& m) {
    std::vector<const SignedNewLeader*> order;
    for (const auto& msg : m) order.push_back(&msg);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->signer < b->signer; });
    std::map<Pos, Selected> best;
    for (const auto* msg : order) {
        for (const auto& r : msg->body.reports) {
            if (r.prep_view == 0) continue;
            auto it = best.find(r.k);
            if (it == best.end() || r.prep_view > it->second.prep_view)
                best[r.k] = Selected{r.x, r.prep_view, &r.cert};
        }
    }
    return best;
}

std::map<Pos, Value> fill_log(const std::map<Pos, Selected>& selected, Pos next) {
    std::map<Pos, Value> log;
    for (const auto& [k, s] : selected) log[k] = s.x;
    // duplicates are judged against the selection, not the partially filled log
    std::map<std::uint64_t, View> best_view;
    for (const auto& [k, s] : selected)
        if (!s.x.is_nop()) best_view[s.x.id] = std::max(best_view[s.x.id], s.prep_view);
    for (Pos k = 1; k < next; ++k) {
        auto it = selected.find(k);
        if (it == selected.end()) {
            log[k] = nop_value();
            continue;
        }
        const auto& s = it->second;
        if (!s.x.is_nop() && best_view[s.x.id] > s.prep_view) log[k] = nop_value();
    }
    return log;
}

bool valid_new_leader(const KeyRegistry& keys, const SignedNewLeader& m, View v, std::uint32_t quorum) {
    if (m.body.v != v || !keys.verify(m)) return false;
    Pos prev = 0;
    for (const auto& r : m.body.reports) {
        if (r.k <= prev) return false;
        prev = r.k;
        if (r.prep_view == 0 || r.prep_view >= v) return false;
        if (!check_prepared(keys, r.cert, r.prep_view, r.k, hash_of(r.x), quorum)) return false;
    }
    return true;
}

NewLog compute_new_log(const std::vector<SignedNewLeader>& m, View v, std::uint64_t rotation_batch) {
    auto selected = select_highest(m);
    NewLog out;
    if (rotation_batch == 0)
        out.next = selected.empty() ? 1 : selected.rbegin()->first + 1;
    else
        out.next = (v - 1) * rotation_batch + 1;
    out.log = fill_log(selected, out.next);
    return out;
}

std::vector<std::pair<Pos, Value>> as_entries(const std::map<Pos, Value>& log) {
    return {log.begin(), log.end()};
}

}  // namespace smr
