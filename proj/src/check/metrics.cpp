#include "smr/check/metrics.hpp"

#include <algorithm>

namespace smr {

TraceMetrics::TraceMetrics(const Trace& trace) : cfg_(&trace.config) {
    for (Pid p = 1; p <= cfg_->n; ++p)
        if (correct(p)) {
            correct_.push_back(p);
            procs_[p];
        }
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const auto& e = trace.events[i];
        if (!correct(e.pid)) continue;
        Proc& pr = procs_[e.pid];
        const At at{e.t, i};
        switch (e.kind) {
            case EventKind::EnterView: {
                pr.entries.emplace_back(e.v, at);
                pr.first_entry.try_emplace(e.v, at);
                auto& vs = views_stat_[e.v];
                if (!vs.first_entry) vs.first_entry = at;
                vs.last_entry = std::max(vs.last_entry, e.t);
                vs.entrants.insert(e.pid);
                max_view_ = std::max(max_view_, e.v);
                break;
            }
            case EventKind::AdvanceCall: {
                pr.first_advance.try_emplace(e.v, at);
                auto& vs = views_stat_[e.v];
                if (!vs.first_advance) vs.first_advance = at;
                vs.last_advance = std::max(vs.last_advance, e.t);
                break;
            }
            case EventKind::Timeouts: pr.timeouts.emplace_back(i, e.a, e.b); break;
            case EventKind::Start:
                if (!pr.start) pr.start = e.t;
                break;
            default: break;
        }
    }
    for (const auto& [v, vs] : views_stat_)
        if (vs.first_entry) views_.push_back(v);
}

const TraceMetrics::Proc* TraceMetrics::proc(Pid p) const {
    auto it = procs_.find(p);
    return it == procs_.end() ? nullptr : &it->second;
}

std::optional<At> TraceMetrics::first_entry(View v) const {
    auto it = views_stat_.find(v);
    if (it == views_stat_.end()) return std::nullopt;
    return it->second.first_entry;
}

std::optional<Tick> TraceMetrics::tm(View v) const {
    if (auto a = first_entry(v)) return a->t;
    return std::nullopt;
}

std::optional<Tick> TraceMetrics::tl(View v) const {
    auto it = views_stat_.find(v);
    if (it == views_stat_.end() || !it->second.first_entry) return std::nullopt;
    return it->second.last_entry;
}

std::size_t TraceMetrics::entrants(View v) const {
    auto it = views_stat_.find(v);
    return it == views_stat_.end() ? 0 : it->second.entrants.size();
}

std::optional<At> TraceMetrics::first_advance(View v) const {
    auto it = views_stat_.find(v);
    if (it == views_stat_.end()) return std::nullopt;
    return it->second.first_advance;
}

std::optional<Tick> TraceMetrics::tam(View v) const {
    if (auto a = first_advance(v)) return a->t;
    return std::nullopt;
}

std::optional<Tick> TraceMetrics::talast(View v) const {
    auto it = views_stat_.find(v);
    if (it == views_stat_.end() || !it->second.first_advance) return std::nullopt;
    return it->second.last_advance;
}

std::optional<At> TraceMetrics::te(Pid p, View v) const {
    const Proc* pr = proc(p);
    if (!pr) return std::nullopt;
    auto it = pr->first_entry.find(v);
    if (it == pr->first_entry.end()) return std::nullopt;
    return it->second;
}

std::optional<At> TraceMetrics::ta(Pid p, View v) const {
    const Proc* pr = proc(p);
    if (!pr) return std::nullopt;
    auto it = pr->first_advance.find(v);
    if (it == pr->first_advance.end()) return std::nullopt;
    return it->second;
}

std::optional<Tick> TraceMetrics::tae(Pid p, View v) const {
    const Proc* pr = proc(p);
    if (!pr) return std::nullopt;
    std::optional<Tick> best;
    if (auto a = ta(p, v)) best = a->t;
    for (const auto& [w, at] : pr->entries)
        if (w > v) {
            best = best ? std::min(*best, at.t) : at.t;
            break;  // entries are in time order
        }
    return best;
}

std::optional<Tick> TraceMetrics::taelast(View v) const {
    Tick last = 0;
    for (Pid p : correct_) {
        auto t = tae(p, v);
        if (!t) return std::nullopt;
        last = std::max(last, *t);
    }
    return last;
}

std::optional<Tick> TraceMetrics::gst_bar() const {
    auto t0 = tam(0);
    if (!t0) return std::nullopt;
    return *t0 < cfg_->gst ? cfg_->gst + cfg_->rho : *t0;
}

View TraceMetrics::sync_view() const {
    auto t0 = tam(0);
    if (!t0 || *t0 >= cfg_->gst) return 1;
    View best = 0;
    for (View v : views_)
        if (*tm(v) < cfg_->gst + cfg_->rho) best = std::max(best, v);
    return best + 1;
}

std::optional<Tick> TraceMetrics::start_time(Pid p) const {
    const Proc* pr = proc(p);
    return pr ? pr->start : std::nullopt;
}

std::pair<Tick, Tick> TraceMetrics::timeouts_before(Pid p, std::size_t idx) const {
    std::pair<Tick, Tick> out{cfg_->init_dur_delivery, cfg_->init_dur_recovery};
    const Proc* pr = proc(p);
    if (!pr) return out;
    for (const auto& [i, d, r] : pr->timeouts) {
        if (i >= idx) break;
        out = {d, r};
    }
    return out;
}

const std::vector<std::pair<View, At>>& TraceMetrics::entries(Pid p) const {
    static const std::vector<std::pair<View, At>> kEmpty;
    const Proc* pr = proc(p);
    return pr ? pr->entries : kEmpty;
}

}  // namespace smr
