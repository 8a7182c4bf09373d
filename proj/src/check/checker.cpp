#include "smr/check/checker.hpp"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "smr/check/metrics.hpp"

namespace smr {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::NotApplicable: return "not-applicable";
    }
    return "?";
}

namespace {

using Key4 = std::tuple<std::string, View, Pos, Hash>;

struct Ctx {
    const Trace& tr;
    const ScenarioConfig& cfg;
    TraceMetrics m;
    std::size_t gst_idx = 0;  // first event strictly after GST
    // Correct deliveries: pid -> value id -> (t, idx); nop excluded.
    std::map<Pid, std::map<Hash, At>> delivered;
    std::vector<std::size_t> correct_broadcasts;
    bool has_receives = false;
    bool has_votes = false;

    explicit Ctx(const Trace& t) : tr(t), cfg(t.config), m(t) {
        const auto& ev = tr.events;
        gst_idx = static_cast<std::size_t>(
            std::partition_point(ev.begin(), ev.end(), [&](const TraceEvent& e) { return e.t <= cfg.gst; }) -
            ev.begin());
        for (Pid p : m.correct_pids()) delivered[p];
        for (std::size_t i = 0; i < ev.size(); ++i) {
            const auto& e = ev[i];
            if (e.kind == EventKind::Receive) has_receives = true;
            if (e.kind == EventKind::VoteSent) has_votes = true;
            if (!m.correct(e.pid)) continue;
            if (e.kind == EventKind::Deliver && !e.b) delivered[e.pid].try_emplace(e.h, At{e.t, i});
            if (e.kind == EventKind::BroadcastCall) correct_broadcasts.push_back(i);
        }
    }

    const TraceEvent& ev(std::size_t i) const { return tr.events[i]; }
    Tick d() const { return cfg.delta; }
    Tick D() const { return cfg.delta_cap; }
    bool bft() const {
        return cfg.protocol == ProtocolKind::PbftLight || cfg.protocol == ProtocolKind::PbftRotation ||
               cfg.protocol == ProtocolKind::HotstuffLight;
    }
    bool leader_correct(View v) const { return v > 0 && m.correct(leader_of(v, cfg.n)); }
    bool all_start(const std::function<bool(Tick)>& pred) const {
        for (Pid p : m.correct_pids()) {
            auto s = m.start_time(p);
            if (!s || !pred(*s)) return false;
        }
        return true;
    }
    std::pair<Tick, Tick> timeouts_at_gst(Pid p) const { return m.timeouts_before(p, gst_idx); }
    std::optional<At> delivery(Pid p, Hash x) const {
        auto it = delivered.at(p).find(x);
        if (it == delivered.at(p).end()) return std::nullopt;
        return it->second;
    }
    // Smallest v >= sync view with tm(v) >= GST.
    std::optional<View> post_gst_view() const {
        for (View v : m.entered_views())
            if (v >= m.sync_view() && *m.tm(v) >= cfg.gst) return v;
        return std::nullopt;
    }
    Tick rotation_delivery_bound() const { return std::max(4 * d(), cfg.t_broadcast + 3 * d()); }
};

class Acc {
public:
    explicit Acc(std::string id) { r_.property = std::move(id); }
    void inst(std::size_t n = 1) { r_.instances += n; }
    bool failed() const { return r_.verdict == Verdict::Fail; }
    // Keeps the first counterexample only.
    void fail(std::string detail, std::vector<std::size_t> witness, std::optional<Tick> bound = {},
              std::optional<Tick> observed = {}) {
        if (failed()) return;
        if (witness.empty()) throw std::logic_error(r_.property + ": failure without witness");
        r_.verdict = Verdict::Fail;
        r_.detail = std::move(detail);
        r_.witness = std::move(witness);
        r_.bound = bound;
        r_.observed = observed;
    }
    CheckResult na(std::string why) {
        r_.verdict = Verdict::NotApplicable;
        r_.detail = std::move(why);
        return r_;
    }
    CheckResult done(const char* na_reason = "premises never held") {
        if (!failed()) {
            if (r_.instances == 0) return na(na_reason);
            r_.detail = std::to_string(r_.instances) + " instance(s) checked";
        }
        return r_;
    }

private:
    CheckResult r_;
};

std::string str(Tick t) { return std::to_string(t); }

// ---------------------------------------------------------------- harness

CheckResult event_order(const Ctx& c) {
    Acc a("harness.event_order");
    const auto& ev = c.tr.events;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        a.inst();
        if (i > 0 && ev[i].t < ev[i - 1].t) a.fail("time decreases along the trace", {i - 1, i});
        if (ev[i].pid < 1 || ev[i].pid > c.cfg.n) a.fail("pid out of range", {i});
    }
    return a.done("empty trace");
}

CheckResult post_gst_delivery(const Ctx& c) {
    Acc a("harness.post_gst_delivery");
    if (!c.has_receives) return a.na("trace has no Receive events");
    const auto& ev = c.tr.events;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& e = ev[i];
        if (e.kind != EventKind::Receive || !c.m.correct(e.pid) || !c.m.correct(static_cast<Pid>(e.a))) continue;
        if (e.b < c.cfg.gst) continue;
        a.inst();
        if (e.t - e.b > c.d())
            a.fail("message sent at " + str(e.b) + " received after delta", {i}, e.b + c.d(), e.t);
    }
    return a.done("no post-GST receipt between correct processes");
}

// ---------------------------------------------------------------- synchronizer

CheckResult monotonicity(const Ctx& c) {
    Acc a("sync.monotonicity");
    for (Pid p : c.m.correct_pids()) {
        const auto& en = c.m.entries(p);
        for (std::size_t j = 0; j < en.size(); ++j) {
            a.inst();
            if (j > 0 && en[j].first <= en[j - 1].first)
                a.fail("p" + std::to_string(p) + " enters view " + std::to_string(en[j].first) + " after view " +
                           std::to_string(en[j - 1].first),
                       {en[j - 1].second.idx, en[j].second.idx});
        }
    }
    return a.done("no view entries");
}

CheckResult validity(const Ctx& c) {
    Acc a("sync.validity");
    for (Pid p : c.m.correct_pids())
        for (const auto& [v, at] : c.m.entries(p)) {
            if (v == 0) continue;
            a.inst();
            auto adv = c.m.first_advance(v - 1);
            if (!adv || adv->t >= at.t)
                a.fail("view " + std::to_string(v) + " entered without an earlier correct advance from " +
                           std::to_string(v - 1),
                       {at.idx}, at.t, adv ? std::optional<Tick>(adv->t) : std::nullopt);
        }
    return a.done("no view entries");
}

CheckResult no_skip(const Ctx& c) {
    Acc a("sync.no_skip");
    const View top = c.m.max_view();
    std::optional<At> prev;
    for (View v = top; v >= 1; --v) {
        // Walking down: first entries must strictly decrease.
        auto fe = c.m.first_entry(v);
        a.inst();
        if (!fe) {
            a.fail("view " + std::to_string(v) + " never entered though a higher view was",
                   {c.m.first_entry(top)->idx});
            break;
        }
        if (prev && !(*fe < *prev))
            a.fail("view " + std::to_string(v + 1) + " first entered before view " + std::to_string(v), {prev->idx, fe->idx},
                   prev->t, fe->t);
        prev = fe;
    }
    return a.done("no view entries");
}

CheckResult wish_monotonicity(const Ctx& c) {
    Acc a("sync.wish_monotonicity");
    std::map<Pid, std::pair<View, std::size_t>> last;
    const auto& ev = c.tr.events;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& e = ev[i];
        if (e.kind != EventKind::WishSent || !c.m.correct(e.pid)) continue;
        a.inst();
        auto it = last.find(e.pid);
        if (it != last.end() && e.v < it->second.first)
            a.fail("WISH view decreases", {it->second.second, i});
        last[e.pid] = {e.v, i};
    }
    return a.done("trace has no WishSent events");
}

CheckResult wish_form(const Ctx& c) {
    Acc a("sync.wish_form");
    const auto& ev = c.tr.events;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& e = ev[i];
        if (e.kind != EventKind::WishSent || !c.m.correct(e.pid)) continue;
        a.inst();
        const auto vp = static_cast<View>(e.b);
        if (e.v != vp && e.v != vp + 1) a.fail("WISH is neither view_plus nor view_plus+1", {i});
    }
    return a.done("trace has no WishSent events");
}

CheckResult bounded_entry(const Ctx& c) {
    Acc a("sync.bounded_entry");
    const View first = c.m.sync_view();
    for (View v : c.m.entered_views()) {
        if (v < first) continue;
        const At fe = *c.m.first_entry(v);
        const Tick bound = fe.t + 2 * c.d();
        if (bound > c.cfg.horizon) continue;
        if (auto adv = c.m.tam(v); adv && *adv < bound) continue;
        a.inst();
        for (Pid p : c.m.correct_pids()) {
            auto te = c.m.te(p, v);
            if (!te)
                a.fail("p" + std::to_string(p) + " never enters view " + std::to_string(v), {fe.idx}, bound);
            else if (te->t > bound)
                a.fail("p" + std::to_string(p) + " enters view " + std::to_string(v) + " late", {fe.idx, te->idx}, bound,
                       te->t);
        }
    }
    return a.done();
}

// (f+1)-th smallest of the given times.
std::optional<Tick> kth(std::vector<Tick> ts, std::size_t k) {
    if (ts.size() < k) return std::nullopt;
    std::nth_element(ts.begin(), ts.begin() + static_cast<std::ptrdiff_t>(k - 1), ts.end());
    return ts[k - 1];
}

Tick liveness_deadline(const Ctx& c, Tick t) { return std::max(t, c.cfg.gst + c.cfg.rho) + c.cfg.rho + 3 * c.d(); }

CheckResult startup(const Ctx& c) {
    Acc a("sync.startup");
    std::vector<Tick> ts;
    std::optional<At> any;
    for (Pid p : c.m.correct_pids())
        if (auto adv = c.m.ta(p, 0)) {
            ts.push_back(adv->t);
            if (!any || adv->t > any->t) any = adv;
        }
    auto t = kth(ts, c.cfg.f + 1);
    if (!t) return a.na("fewer than f+1 correct processes advance from view 0");
    const Tick deadline = liveness_deadline(c, *t);
    if (deadline > c.cfg.horizon) return a.na("horizon ends before the startup deadline");
    a.inst();
    if (!c.m.tm(1)) a.fail("no correct process enters view 1", {any->idx}, deadline);
    return a.done();
}

CheckResult progress(const Ctx& c) {
    Acc a("sync.progress");
    for (View v : c.m.entered_views()) {
        if (v == 0) continue;
        std::vector<Tick> ts;
        for (Pid p : c.m.correct_pids())
            if (auto t = c.m.tae(p, v)) ts.push_back(*t);
        auto t = kth(ts, c.cfg.f + 1);
        if (!t) continue;
        const Tick deadline = liveness_deadline(c, *t);
        if (deadline > c.cfg.horizon) continue;
        a.inst();
        if (!c.m.tm(v + 1))
            a.fail("f+1 correct processes left view " + std::to_string(v) + " but nobody entered " +
                       std::to_string(v + 1),
                   {c.m.first_entry(v)->idx}, deadline);
    }
    return a.done();
}

CheckResult latency_a(const Ctx& c) {
    Acc a("sync.latency_a");
    auto t0 = c.m.tam(0);
    if (!t0 || *t0 >= c.cfg.gst) return a.na("no correct advance from view 0 before GST");
    for (View v : c.m.entered_views()) {
        const Tick bound = std::max(*c.m.tm(v), c.cfg.gst + c.cfg.rho) + 2 * c.d();
        a.inst();
        for (Pid p : c.m.correct_pids())
            if (auto te = c.m.te(p, v); te && te->t > bound)
                a.fail("p" + std::to_string(p) + " enters view " + std::to_string(v) + " late",
                       {c.m.first_entry(v)->idx, te->idx}, bound, te->t);
    }
    return a.done();
}

CheckResult latency_b(const Ctx& c) {
    Acc a("sync.latency_b");
    auto t0 = c.m.tam(0);
    const bool pre = t0 && *t0 < c.cfg.gst;
    for (View w : c.m.entered_views()) {
        if (w == 0) continue;
        const View v = w - 1;
        auto last = c.m.taelast(v);
        if (!last) continue;
        const Tick bound = (pre ? std::max(*last, c.cfg.gst + c.cfg.rho) : *last) + c.d();
        a.inst();
        for (Pid p : c.m.correct_pids())
            if (auto te = c.m.te(p, w); te && te->t > bound)
                a.fail("p" + std::to_string(p) + " enters view " + std::to_string(w) + " late", {te->idx}, bound, te->t);
    }
    return a.done();
}

CheckResult bounded_space(const Ctx& c) {
    Acc a("sync.bounded_space");
    const auto& ev = c.tr.events;
    const std::int64_t n = c.cfg.n;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& e = ev[i];
        if (e.kind != EventKind::MemSample || !c.m.correct(e.pid)) continue;
        a.inst();
        if (e.a > n) a.fail("synchronizer holds more than n entries", {i}, n, e.a);
        if (e.b > 10 * n) a.fail("future buffer exceeds one slot per (type, sender)", {i}, 10 * n, e.b);
    }
    return a.done("trace has no MemSample events");
}

// ---------------------------------------------------------------- consensus-sync

CheckResult csync(const Ctx& c, int which) {
    static const char* ids[] = {"", "csync.I", "csync.II", "csync.III", "csync.IV", "csync.V"};
    Acc a(ids[which]);
    if (c.cfg.protocol != ProtocolKind::ConsensusSync) return a.na("not a consensus-sync run");
    std::map<Pid, std::vector<std::pair<View, std::size_t>>> per;
    std::map<View, std::pair<At, Tick>> first_last;
    std::map<View, std::set<Pid>> who;
    const auto& ev = c.tr.events;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& e = ev[i];
        if (e.kind != EventKind::EnterConsensusView || !c.m.correct(e.pid)) continue;
        per[e.pid].emplace_back(e.v, i);
        auto [it, fresh] = first_last.try_emplace(e.v, At{e.t, i}, e.t);
        it->second.second = std::max(it->second.second, e.t);
        who[e.v].insert(e.pid);
    }
    if (per.empty()) return a.na("trace has no EnterConsensusView events");
    if (which == 1) {
        for (const auto& [p, en] : per)
            for (std::size_t j = 0; j < en.size(); ++j) {
                a.inst();
                if (j > 0 && en[j].first <= en[j - 1].first)
                    a.fail("consensus views not strictly increasing", {en[j - 1].second, en[j].second});
            }
        return a.done();
    }
    const Tick unit = c.cfg.view_unit();
    std::optional<View> vp;
    for (const auto& [v, fl] : first_last)
        if (v >= c.m.sync_view() && fl.first.t >= c.cfg.gst && static_cast<Tick>(v) * unit >= 2 * c.d()) {
            vp = v;
            break;
        }
    if (!vp) return a.na("no consensus view qualifies as the stabilization view");
    const View top = first_last.rbegin()->first;
    if (which == 2) {
        a.inst();
        const At fe = first_last.at(*vp).first;
        if (fe.t < c.cfg.gst) a.fail("stabilization view entered before GST", {fe.idx}, c.cfg.gst, fe.t);
        return a.done();
    }
    for (View v = *vp; v <= top; ++v) {
        auto it = first_last.find(v);
        if (which == 3) {
            if (it == first_last.end()) {
                a.inst();
                a.fail("consensus view " + std::to_string(v) + " skipped", {first_last.rbegin()->second.first.idx});
                continue;
            }
            if (it->second.first.t + 2 * c.d() > c.cfg.horizon) continue;
            a.inst();
            if (who[v].size() < c.m.correct_pids().size())
                a.fail("some correct process never enters consensus view " + std::to_string(v),
                       {it->second.first.idx});
        } else if (which == 4) {
            if (it == first_last.end()) continue;
            a.inst();
            const Tick bound = it->second.first.t + 2 * c.d();
            if (it->second.second > bound) {
                std::size_t late = it->second.first.idx;
                for (const auto& [p, en] : per)
                    for (auto [w, idx] : en)
                        if (w == v && ev[idx].t == it->second.second) late = idx;
                a.fail("consensus view " + std::to_string(v) + " entries spread over more than 2*delta",
                       {it->second.first.idx, late}, bound, it->second.second);
            }
        } else {
            auto nx = first_last.find(v + 1);
            if (it == first_last.end() || nx == first_last.end()) continue;
            a.inst();
            const Tick bound = it->second.first.t + static_cast<Tick>(v) * unit;
            if (nx->second.first.t <= bound)
                a.fail("consensus view " + std::to_string(v + 1) + " entered before view " + std::to_string(v) +
                           " ran its full duration",
                       {it->second.first.idx, nx->second.first.idx}, bound, nx->second.first.t);
        }
    }
    return a.done();
}

// ---------------------------------------------------------------- certificates

struct Certs {
    // Potential certificates: enough correct signers that a quorum could exist.
    std::map<Key4, std::size_t> potential;  // -> index of the completing vote
    std::map<std::tuple<std::string, View, Pos, Hash, Pid>, std::size_t> first_vote;
};

Certs collect_certs(const Ctx& c) {
    Certs out;
    const std::size_t need = c.cfg.quorum() - std::min<std::size_t>(c.cfg.faulty.size(), c.cfg.quorum());
    std::map<Key4, std::set<Pid>> signers;
    const auto& ev = c.tr.events;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& e = ev[i];
        if (e.kind != EventKind::VoteSent || !c.m.correct(e.pid) || static_cast<Pid>(e.a) != e.pid) continue;
        Key4 key{e.label, e.v, e.k, e.h};
        out.first_vote.try_emplace({e.label, e.v, e.k, e.h, e.pid}, i);
        auto& s = signers[key];
        s.insert(e.pid);
        if (s.size() >= need) out.potential.try_emplace(key, i);
    }
    return out;
}

struct CertView {
    Pos k;
    View v;
    Hash h;
    std::size_t idx;
};

std::vector<CertView> of_kind(const Certs& cs, const std::string& kind) {
    std::vector<CertView> out;
    for (const auto& [key, idx] : cs.potential)
        if (std::get<0>(key) == kind) out.push_back({std::get<2>(key), std::get<1>(key), std::get<3>(key), idx});
    return out;
}

CheckResult cert_check(const Ctx& c, const std::string& id) {
    Acc a(id);
    if (!c.bft()) return a.na("not a replication protocol run");
    if (!c.has_votes) return a.na("trace has no VoteSent events");
    const Certs cs = collect_certs(c);
    const auto prepared = of_kind(cs, "PREPARE");
    const auto committed = of_kind(cs, "COMMIT");
    if (id == "cert.prepared_agreement" || id == "cert.no_duplicate") {
        const bool agreement = id == "cert.prepared_agreement";
        std::map<std::pair<View, Pos>, const CertView*> by_slot;
        std::map<std::pair<View, Hash>, const CertView*> by_value;
        for (const auto& p : prepared) {
            a.inst();
            if (agreement) {
                auto [it, fresh] = by_slot.try_emplace({p.v, p.k}, &p);
                if (!fresh && it->second->h != p.h)
                    a.fail("two values prepared at view " + std::to_string(p.v) + " position " + std::to_string(p.k),
                           {it->second->idx, p.idx});
            } else if (p.h != 0) {
                auto [it, fresh] = by_value.try_emplace({p.v, p.h}, &p);
                if (!fresh && it->second->k != p.k)
                    a.fail("value prepared at two positions in view " + std::to_string(p.v), {it->second->idx, p.idx});
            }
        }
        return a.done("no prepared certificate");
    }
    if (id == "cert.commit_implies_prepare") {
        for (const auto& cm : committed) {
            a.inst();
            if (!cs.potential.contains({"PREPARE", cm.v, cm.k, cm.h}))
                a.fail("committed without a prepared certificate", {cm.idx});
        }
        return a.done("no committed certificate");
    }
    if (id == "cert.committed_agreement") {
        std::map<Pos, const CertView*> by_pos;
        for (const auto& cm : committed) {
            a.inst();
            auto [it, fresh] = by_pos.try_emplace(cm.k, &cm);
            if (!fresh && it->second->h != cm.h)
                a.fail("two values committed at position " + std::to_string(cm.k), {it->second->idx, cm.idx});
        }
        return a.done("no committed certificate");
    }
    if (id == "cert.commit_locks_later") {
        std::multimap<Pos, const CertView*> by_pos;
        std::multimap<Hash, const CertView*> by_hash;
        for (const auto& p : prepared) {
            by_pos.emplace(p.k, &p);
            if (p.h != 0) by_hash.emplace(p.h, &p);
        }
        for (const auto& cm : committed) {
            for (auto [it, end] = by_pos.equal_range(cm.k); it != end; ++it) {
                const CertView& p = *it->second;
                if (p.v <= cm.v) continue;
                a.inst();
                if (p.h != cm.h)
                    a.fail("a later view prepares a different value at a committed position", {cm.idx, p.idx});
            }
            if (cm.h == 0) continue;
            for (auto [it, end] = by_hash.equal_range(cm.h); it != end; ++it) {
                const CertView& p = *it->second;
                if (p.v <= cm.v) continue;
                a.inst();
                if (p.k != cm.k)
                    a.fail("a committed value is prepared again at another position", {cm.idx, p.idx});
            }
        }
        return a.done("no committed certificate followed by a later prepared one");
    }
    // cert.unforgeability
    const auto& ev = c.tr.events;
    bool any = false;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& e = ev[i];
        if (e.kind != EventKind::CertAccepted || !c.m.correct(e.pid)) continue;
        any = true;
        for (Pid s : e.signers) {
            if (!c.m.correct(s)) continue;
            a.inst();
            auto it = cs.first_vote.find({e.label, e.v, e.k, e.h, s});
            if (it == cs.first_vote.end() || it->second > i)
                a.fail("certificate carries a vote p" + std::to_string(s) + " never sent", {i});
        }
    }
    return a.done(any ? "no correct signer in accepted certificates" : "trace has no CertAccepted events");
}

CheckResult lock_monotonic(const Ctx& c) {
    Acc a("hotstuff.lock_monotonic");
    if (c.cfg.protocol != ProtocolKind::HotstuffLight) return a.na("not a HotStuff run");
    std::map<Pid, std::pair<View, std::size_t>> last;
    const auto& ev = c.tr.events;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& e = ev[i];
        if (e.kind != EventKind::LockSet || !c.m.correct(e.pid)) continue;
        a.inst();
        auto it = last.find(e.pid);
        if (it != last.end() && e.v < it->second.first) a.fail("lock view decreases", {it->second.second, i});
        last[e.pid] = {e.v, i};
    }
    return a.done("trace has no LockSet events");
}

// ---------------------------------------------------------------- abcast

CheckResult integrity(const Ctx& c) {
    Acc a("abcast.integrity");
    if (!c.bft()) return a.na("not a replication protocol run");
    std::map<std::pair<Pid, Hash>, std::size_t> seen;
    const auto& ev = c.tr.events;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& e = ev[i];
        if (e.kind != EventKind::Deliver || e.b || !c.m.correct(e.pid)) continue;
        a.inst();
        auto [it, fresh] = seen.try_emplace({e.pid, e.h}, i);
        if (!fresh) a.fail("value delivered twice", {it->second, i});
    }
    return a.done("no deliveries");
}

CheckResult external_validity(const Ctx& c) {
    Acc a("abcast.external_validity");
    if (!c.bft()) return a.na("not a replication protocol run");
    const auto& ev = c.tr.events;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& e = ev[i];
        if (e.kind != EventKind::Deliver || e.b || !c.m.correct(e.pid)) continue;
        a.inst();
        if (e.a != 1) a.fail("invalid value delivered", {i});
    }
    return a.done("no deliveries");
}

CheckResult ordering(const Ctx& c) {
    Acc a("abcast.ordering");
    if (!c.bft()) return a.na("not a replication protocol run");
    std::map<Pos, std::size_t> at_pos;
    std::map<Pid, std::pair<Pos, std::size_t>> last;
    const auto& ev = c.tr.events;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& e = ev[i];
        if (e.kind != EventKind::Deliver || !c.m.correct(e.pid)) continue;
        a.inst();
        auto it = last.find(e.pid);
        const Pos expect = it == last.end() ? 1 : it->second.first + 1;
        if (e.k != expect) {
            std::vector<std::size_t> w{i};
            if (it != last.end()) w.insert(w.begin(), it->second.second);
            a.fail("position " + std::to_string(e.k) + " delivered where " + std::to_string(expect) + " was due", w);
        }
        last[e.pid] = {e.k, i};
        auto [p, fresh] = at_pos.try_emplace(e.k, i);
        if (!fresh && ev[p->second].h != e.h)
            a.fail("processes disagree at position " + std::to_string(e.k), {p->second, i});
    }
    return a.done("no deliveries");
}

CheckResult liveness(const Ctx& c) {
    Acc a("abcast.liveness");
    if (!c.bft()) return a.na("not a replication protocol run");
    if (!c.cfg.liveness_cutoff) return a.na("scenario sets no liveness cutoff");
    const Tick cut = *c.cfg.liveness_cutoff;
    std::map<Hash, std::size_t> due;  // value -> event that obliges delivery
    for (std::size_t i : c.correct_broadcasts)
        if (c.ev(i).t <= cut) due.try_emplace(c.ev(i).h, i);
    for (const auto& [p, vals] : c.delivered)
        for (const auto& [x, at] : vals)
            if (at.t <= cut) due.try_emplace(x, at.idx);
    for (const auto& [x, idx] : due) {
        a.inst();
        for (Pid p : c.m.correct_pids())
            if (!c.delivery(p, x))
                a.fail("p" + std::to_string(p) + " never delivers value " + std::to_string(x), {idx}, c.cfg.horizon);
    }
    return a.done("nothing broadcast or delivered before the cutoff");
}

// ---------------------------------------------------------------- latency

std::string premise_fail(const char* what) { return std::string("premise not met: ") + what; }

CheckResult latency_recovery(const Ctx& c) {
    Acc a("latency.recovery");
    if (c.cfg.protocol != ProtocolKind::PbftLight) return a.na("not a PBFT-light run");
    if (!c.cfg.latency_mode) return a.na(premise_fail("timeouts are not capped"));
    if (!c.all_start([&](Tick s) { return s < c.cfg.gst; }))
        return a.na(premise_fail("some correct process starts at or after GST"));
    const Tick d = c.d(), D = c.D();
    if (c.cfg.init_dur_recovery > 6 * D || c.cfg.init_dur_delivery > 4 * D)
        return a.na(premise_fail("initial timeouts above their caps"));
    for (Pid p : c.m.correct_pids()) {
        auto [dd, rr] = c.timeouts_at_gst(p);
        if (rr <= 6 * d || dd <= 4 * d) return a.na(premise_fail("timeouts at GST too short"));
    }
    if (!c.leader_correct(c.m.sync_view())) return a.na(premise_fail("leader of the first synchronous view is faulty"));
    const Tick rho = c.cfg.rho, gst = c.cfg.gst;
    const Tick bound = gst + rho + std::max(rho + d, 6 * D) + 4 * D + std::max(rho, d) + 7 * d;
    if (bound > c.cfg.horizon) return a.na("horizon ends before the bound " + str(bound));
    for (std::size_t i : c.correct_broadcasts) {
        if (c.ev(i).t >= gst) continue;
        a.inst();
        for (Pid p : c.m.correct_pids()) {
            auto dl = c.delivery(p, c.ev(i).h);
            if (!dl || dl->t > bound) {
                std::vector<std::size_t> w{i};
                if (dl) w.push_back(dl->idx);
                a.fail("p" + std::to_string(p) + " delivers a pre-GST value late", w, bound,
                       dl ? std::optional<Tick>(dl->t) : std::nullopt);
            }
        }
    }
    return a.done("no value broadcast before GST");
}

CheckResult latency_good_case(const Ctx& c) {
    Acc a("latency.good_case");
    if (c.cfg.protocol != ProtocolKind::PbftLight) return a.na("not a PBFT-light run");
    if (!c.cfg.latency_mode) return a.na(premise_fail("timeouts are not capped"));
    if (!c.all_start([&](Tick s) { return s >= c.cfg.gst; }))
        return a.na(premise_fail("some correct process starts before GST"));
    const Tick d = c.d();
    if (c.cfg.init_dur_recovery <= 5 * d || c.cfg.init_dur_delivery <= 4 * d)
        return a.na(premise_fail("initial timeouts too short"));
    auto last0 = c.m.taelast(0);
    if (!last0) return a.na("some correct process never leaves view 0");
    a.inst();
    if (c.m.sync_view() != 1) {
        a.fail("first synchronous view is not 1", {c.m.first_advance(0)->idx});
        return a.done();
    }
    const Tick entry_bound = *last0 + d;
    for (Pid p : c.m.correct_pids())
        if (auto te = c.m.te(p, 1); te && te->t > entry_bound)
            a.fail("p" + std::to_string(p) + " enters view 1 late", {te->idx}, entry_bound, te->t);
    if (!c.leader_correct(1)) return a.done();
    for (std::size_t i : c.correct_broadcasts) {
        const Tick t = c.ev(i).t;
        if (t < c.cfg.gst) continue;
        const Tick bound = std::max(t, entry_bound) + 4 * d;
        if (bound > c.cfg.horizon) continue;
        a.inst();
        for (Pid p : c.m.correct_pids()) {
            auto dl = c.delivery(p, c.ev(i).h);
            if (!dl || dl->t > bound) {
                std::vector<std::size_t> w{i};
                if (dl) w.push_back(dl->idx);
                a.fail("p" + std::to_string(p) + " delivers late", w, bound,
                       dl ? std::optional<Tick>(dl->t) : std::nullopt);
            }
        }
    }
    return a.done();
}

CheckResult latency_rotation_recovery(const Ctx& c) {
    Acc a("latency.rotation_recovery");
    if (c.cfg.protocol != ProtocolKind::PbftRotation) return a.na("not a PBFT-rotation run");
    if (!c.cfg.latency_mode) return a.na(premise_fail("timeouts are not capped"));
    if (!c.all_start([&](Tick s) { return s < c.cfg.gst; }))
        return a.na(premise_fail("some correct process starts at or after GST"));
    const Tick d = c.d(), D = c.D(), T = c.cfg.t_broadcast;
    const Tick cap_delivery = std::max(4 * D, T + 3 * D);
    if (c.cfg.init_dur_recovery > 4 * D || c.cfg.init_dur_delivery > cap_delivery)
        return a.na(premise_fail("initial timeouts above their caps"));
    for (Pid p : c.m.correct_pids()) {
        auto [dd, rr] = c.timeouts_at_gst(p);
        if (rr <= 4 * d || dd <= c.rotation_delivery_bound()) return a.na(premise_fail("timeouts at GST too short"));
    }
    const View sv = c.m.sync_view();
    const Tick bound =
        c.cfg.gst + c.cfg.rho + 4 * D + static_cast<Tick>(c.cfg.batch) * cap_delivery + 3 * d;
    if (!c.m.tm(sv)) {
        if (bound > c.cfg.horizon) return a.na("horizon ends before the bound " + str(bound));
        a.inst();
        a.fail("first synchronous view never entered", {c.m.first_advance(0) ? c.m.first_advance(0)->idx : 0}, bound);
        return a.done();
    }
    a.inst();
    for (Pid p : c.m.correct_pids())
        if (auto te = c.m.te(p, sv); te && te->t > bound)
            a.fail("p" + std::to_string(p) + " enters the first synchronous view late", {te->idx}, bound, te->t);
    return a.done();
}

CheckResult latency_crashed_leader(const Ctx& c) {
    Acc a("latency.crashed_leader");
    if (c.cfg.protocol != ProtocolKind::PbftRotation) return a.na("not a PBFT-rotation run");
    if (!c.all_start([&](Tick s) { return s >= c.cfg.gst; }))
        return a.na(premise_fail("some correct process starts before GST"));
    const Tick d = c.d(), R = c.cfg.init_dur_recovery;
    if (R <= 4 * d || c.cfg.init_dur_delivery <= c.rotation_delivery_bound())
        return a.na(premise_fail("initial timeouts too short"));
    // Views before v must all end by full batches at every correct process.
    auto batch_ended = [&](View w) {
        for (Pid p : c.m.correct_pids()) {
            auto ta = c.m.ta(p, w);
            if (!ta) return false;
            const auto& lbl = c.ev(ta->idx).label;
            if (lbl != "batch" && lbl != "batch-at-init") return false;
        }
        return true;
    };
    for (View v = 1; v <= c.m.max_view(); ++v) {
        const Pid ld = leader_of(v, c.cfg.n);
        auto crash = c.cfg.crash_time(ld);
        const bool crashed = c.cfg.is_faulty(ld) && crash && *crash <= 0;
        if (crashed && c.m.tm(v) && c.m.tm(v + 1)) {
            a.inst();
            const Tick bound = *c.m.tl(v) + R + d;
            for (Pid p : c.m.correct_pids())
                if (auto te = c.m.te(p, v + 1); te && te->t > bound)
                    a.fail("p" + std::to_string(p) + " leaves the crashed leader's view late",
                           {c.m.first_entry(v)->idx, te->idx}, bound, te->t);
        }
        if (!batch_ended(v)) break;
    }
    return a.done("no view with an initially crashed leader reached through full batches");
}

// ---------------------------------------------------------------- liveness

CheckResult completeness(const Ctx& c) {
    Acc a("liveness.completeness");
    if (c.cfg.protocol != ProtocolKind::PbftLight) return a.na("not a PBFT-light run");
    if (!c.has_receives) return a.na("trace has no Receive events");
    const auto& ev = c.tr.events;
    // Current entry per correct process while scanning.
    std::map<Pid, std::pair<View, At>> cur;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& e = ev[i];
        if (!c.m.correct(e.pid)) continue;
        if (e.kind == EventKind::EnterView) cur[e.pid] = {e.v, At{e.t, i}};
        if (e.kind != EventKind::Receive || e.label != "BROADCAST") continue;
        auto it = cur.find(e.pid);
        if (it == cur.end() || it->second.second.t < c.cfg.gst) continue;
        const auto [v, te] = it->second;
        auto [dd, rr] = c.m.timeouts_before(e.pid, te.idx);
        const Tick deadline = std::max(e.t, te.t + rr) + dd;
        if (deadline > c.cfg.horizon) continue;
        a.inst();
        auto dl = c.delivery(e.pid, e.h);
        if (dl && dl->t <= deadline) continue;
        auto left = c.m.tae(e.pid, v);
        if (!left || *left > deadline)
            a.fail("p" + std::to_string(e.pid) + " neither delivers the value nor leaves view " + std::to_string(v),
                   {i}, deadline, left);
    }
    return a.done("no post-GST BROADCAST receipt with a deadline inside the horizon");
}

// In a good view, a correct process with long enough timeouts is never the
// first correct process to advance because of a timer.
CheckResult accuracy_impl(const Ctx& c, const std::string& id, View from, bool need_post_gst, Tick min_recovery,
                          Tick min_delivery) {
    Acc a(id);
    const auto& ev = c.tr.events;
    std::map<View, std::vector<std::size_t>> advances;
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (ev[i].kind == EventKind::AdvanceCall && c.m.correct(ev[i].pid)) advances[ev[i].v].push_back(i);
    for (View v : c.m.entered_views()) {
        if (v < from || !c.leader_correct(v)) continue;
        if (need_post_gst && *c.m.tm(v) < c.cfg.gst) continue;
        a.inst();
        auto it = advances.find(v);
        if (it == advances.end()) continue;
        const Tick first_t = ev[it->second.front()].t;
        bool excused = false;
        std::size_t culprit = it->second.front();
        for (std::size_t i : it->second) {
            if (ev[i].t != first_t) break;
            const Pid p = ev[i].pid;
            auto te = c.m.te(p, v);
            auto [dd, rr] = te ? c.m.timeouts_before(p, te->idx) : std::pair<Tick, Tick>{0, 0};
            const bool long_timeouts = rr > min_recovery && dd > min_delivery;
            if (ev[i].label != "timer" || !long_timeouts) excused = true;
            else culprit = i;
        }
        if (!excused)
            a.fail("first advance in view " + std::to_string(v) + " is a timer expiry despite long timeouts",
                   {c.m.first_entry(v)->idx, culprit});
    }
    return a.done("no view with a correct leader after stabilization");
}

CheckResult accuracy(const Ctx& c) {
    if (c.cfg.protocol != ProtocolKind::PbftLight) return Acc("liveness.accuracy").na("not a PBFT-light run");
    return accuracy_impl(c, "liveness.accuracy", c.m.sync_view(), true, 6 * c.d(), 4 * c.d());
}

CheckResult rotation_accuracy(const Ctx& c) {
    Acc a("liveness.rotation_accuracy");
    Tick min_delivery = 0;
    if (c.cfg.protocol == ProtocolKind::PbftRotation) min_delivery = c.rotation_delivery_bound();
    else if (c.cfg.protocol == ProtocolKind::HotstuffLight)
        min_delivery = std::max(5 * c.d(), c.cfg.t_broadcast + 4 * c.d());
    else return a.na("not a rotating-leader run");
    auto from = c.post_gst_view();
    if (!from) return a.na("no view entered after GST");
    return accuracy_impl(c, "liveness.rotation_accuracy", *from, false, 4 * c.d(), min_delivery);
}

CheckResult perpetual_rotation(const Ctx& c) {
    Acc a("liveness.perpetual_rotation");
    if (c.cfg.protocol != ProtocolKind::PbftRotation && c.cfg.protocol != ProtocolKind::HotstuffLight)
        return a.na("not a rotating-leader run");
    if (c.cfg.target_view == 0) return a.na("scenario sets no target view");
    std::optional<std::size_t> last;
    for (View v = 1; v <= c.cfg.target_view; ++v) {
        a.inst();
        auto fe = c.m.first_entry(v);
        if (!fe) {
            std::size_t w = last ? *last : (c.tr.events.empty() ? 0 : c.tr.events.size() - 1);
            a.fail("view " + std::to_string(v) + " is never entered", {w});
            break;
        }
        last = fe->idx;
    }
    return a.done();
}

CheckResult toy_progress(const Ctx& c) {
    Acc a("toy.progress");
    if (c.cfg.protocol != ProtocolKind::ToyClient) return a.na("not a toy-client run");
    if (c.cfg.target_view == 0) return a.na("scenario sets no target view");
    for (Pid p : c.m.correct_pids()) {
        a.inst();
        const auto& en = c.m.entries(p);
        if (en.empty() || en.back().first < c.cfg.target_view) {
            std::size_t w = en.empty() ? (c.tr.events.empty() ? 0 : c.tr.events.size() - 1) : en.back().second.idx;
            a.fail("p" + std::to_string(p) + " stops below the target view", {w},
                   static_cast<Tick>(c.cfg.target_view), en.empty() ? 0 : static_cast<Tick>(en.back().first));
        }
    }
    return a.done();
}

using CheckFn = std::function<CheckResult(const Ctx&)>;

const std::vector<std::pair<std::string, CheckFn>>& registry() {
    static const std::vector<std::pair<std::string, CheckFn>> r = [] {
        std::vector<std::pair<std::string, CheckFn>> v{
            {"harness.event_order", event_order},
            {"harness.post_gst_delivery", post_gst_delivery},
            {"sync.monotonicity", monotonicity},
            {"sync.validity", validity},
            {"sync.no_skip", no_skip},
            {"sync.wish_monotonicity", wish_monotonicity},
            {"sync.wish_form", wish_form},
            {"sync.bounded_entry", bounded_entry},
            {"sync.startup", startup},
            {"sync.progress", progress},
            {"sync.latency_a", latency_a},
            {"sync.latency_b", latency_b},
            {"sync.bounded_space", bounded_space},
        };
        for (int i = 1; i <= 5; ++i) {
            static const char* ids[] = {"", "csync.I", "csync.II", "csync.III", "csync.IV", "csync.V"};
            v.emplace_back(ids[i], [i](const Ctx& c) { return csync(c, i); });
        }
        for (const char* id : {"cert.prepared_agreement", "cert.no_duplicate", "cert.commit_implies_prepare",
                               "cert.commit_locks_later", "cert.committed_agreement", "cert.unforgeability"})
            v.emplace_back(id, [s = std::string(id)](const Ctx& c) { return cert_check(c, s); });
        v.insert(v.end(), {
                              {"hotstuff.lock_monotonic", lock_monotonic},
                              {"abcast.integrity", integrity},
                              {"abcast.external_validity", external_validity},
                              {"abcast.ordering", ordering},
                              {"abcast.liveness", liveness},
                              {"latency.recovery", latency_recovery},
                              {"latency.good_case", latency_good_case},
                              {"latency.rotation_recovery", latency_rotation_recovery},
                              {"latency.crashed_leader", latency_crashed_leader},
                              {"liveness.completeness", completeness},
                              {"liveness.accuracy", accuracy},
                              {"liveness.rotation_accuracy", rotation_accuracy},
                              {"liveness.perpetual_rotation", perpetual_rotation},
                              {"toy.progress", toy_progress},
                          });
        return v;
    }();
    return r;
}

bool matches(const std::string& id, const std::string& sel) {
    return id == sel || (id.size() > sel.size() && id.compare(0, sel.size(), sel) == 0 && id[sel.size()] == '.');
}

}  // namespace

const std::vector<std::string>& all_properties() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (const auto& [id, fn] : registry()) out.push_back(id);
        return out;
    }();
    return ids;
}

std::vector<std::string> default_properties(ProtocolKind p) {
    std::vector<std::string> groups{"harness", "sync"};
    switch (p) {
        case ProtocolKind::ToyClient: groups.push_back("toy"); break;
        case ProtocolKind::ConsensusSync: groups.push_back("csync"); break;
        case ProtocolKind::PbftLight:
            groups.insert(groups.end(), {"cert", "abcast", "latency.recovery", "latency.good_case",
                                         "liveness.completeness", "liveness.accuracy"});
            break;
        case ProtocolKind::PbftRotation:
            groups.insert(groups.end(), {"cert", "abcast", "latency.rotation_recovery", "latency.crashed_leader",
                                         "liveness.rotation_accuracy", "liveness.perpetual_rotation"});
            break;
        case ProtocolKind::HotstuffLight:
            groups.insert(groups.end(), {"cert", "hotstuff", "abcast", "liveness.rotation_accuracy",
                                         "liveness.perpetual_rotation"});
            break;
    }
    return select_properties(groups);
}

std::vector<std::string> select_properties(const std::vector<std::string>& selection) {
    std::vector<std::string> out;
    for (const auto& sel : selection) {
        bool hit = false;
        for (const auto& id : all_properties())
            if (matches(id, sel)) {
                hit = true;
                if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
            }
        if (!hit) throw std::invalid_argument("unknown property or group: " + sel);
    }
    // Keep registry order.
    std::vector<std::string> ordered;
    for (const auto& id : all_properties())
        if (std::find(out.begin(), out.end(), id) != out.end()) ordered.push_back(id);
    return ordered;
}

CheckReport check_trace(const Trace& trace, const CheckOptions& opts) {
    const Ctx ctx(trace);
    std::vector<std::string> ids;
    if (!opts.only.empty()) ids = select_properties(opts.only);
    else if (!trace.config.checks.empty()) ids = select_properties(trace.config.checks);
    else ids = default_properties(trace.config.protocol);
    CheckReport rep;
    rep.scenario = trace.config.name;
    const auto required = select_properties(trace.config.require_premises);
    for (const auto& id : required)
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    for (const auto& [id, fn] : registry())
        if (std::find(ids.begin(), ids.end(), id) != ids.end()) {
            rep.results.push_back(fn(ctx));
            if (rep.results.back().verdict == Verdict::NotApplicable &&
                std::find(required.begin(), required.end(), id) != required.end())
                rep.unmet_premises.push_back(id);
        }
    return rep;
}

std::size_t CheckReport::count(Verdict v) const {
    return static_cast<std::size_t>(
        std::count_if(results.begin(), results.end(), [v](const CheckResult& r) { return r.verdict == v; }));
}

bool CheckReport::ok(bool strict_premises) const {
    return count(Verdict::Fail) == 0 && unmet_premises.empty() &&
           (!strict_premises || count(Verdict::NotApplicable) == 0);
}

const CheckResult* CheckReport::find(const std::string& property) const {
    for (const auto& r : results)
        if (r.property == property) return &r;
    return nullptr;
}

nlohmann::ordered_json CheckReport::to_json(const Trace& trace) const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["summary"] = {{"pass", count(Verdict::Pass)},
                    {"fail", count(Verdict::Fail)},
                    {"not_applicable", count(Verdict::NotApplicable)}};
    j["unmet_premises"] = unmet_premises;
    auto& arr = j["results"] = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json o;
        o["property"] = r.property;
        o["verdict"] = to_string(r.verdict);
        o["detail"] = r.detail;
        o["instances"] = r.instances;
        if (r.bound) o["bound"] = *r.bound;
        if (r.observed) o["observed"] = *r.observed;
        auto& w = o["witness"] = nlohmann::ordered_json::array();
        for (auto i : r.witness) {
            nlohmann::ordered_json ev;
            ev["index"] = i;
            if (i < trace.events.size()) ev["event"] = event_to_json(trace.events[i]);
            w.push_back(std::move(ev));
        }
        arr.push_back(std::move(o));
    }
    return j;
}

std::string CheckReport::table() const {
    std::size_t width = 8;
    for (const auto& r : results) width = std::max(width, r.property.size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(width) + 2) << "property" << std::setw(16) << "verdict"
       << "detail\n";
    for (const auto& r : results) {
        os << std::setw(static_cast<int>(width) + 2) << r.property << std::setw(16) << to_string(r.verdict) << r.detail;
        if (r.bound) os << " [bound " << *r.bound;
        if (r.observed) os << (r.bound ? ", " : " [") << "observed " << *r.observed;
        if (r.bound || r.observed) os << "]";
        if (!r.witness.empty()) {
            os << " @";
            for (auto i : r.witness) os << " #" << i;
        }
        os << "\n";
    }
    os << count(Verdict::Pass) << " pass, " << count(Verdict::Fail) << " fail, " << count(Verdict::NotApplicable)
       << " not applicable\n";
    for (const auto& id : unmet_premises) os << "premise required but not met: " << id << "\n";
    return os.str();
}

}  // namespace smr
