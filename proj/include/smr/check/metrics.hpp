#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "smr/trace.hpp"

namespace smr {

// A point in the trace: time plus position, so same-tick events stay ordered.
struct At {
    Tick t = 0;
    std::size_t idx = 0;
    friend auto operator<=>(const At&, const At&) = default;
};

// Per-view and per-process statistics over correct processes only.
class TraceMetrics {
public:
    explicit TraceMetrics(const Trace& trace);

    const ScenarioConfig& config() const { return *cfg_; }
    bool correct(Pid p) const { return p >= 1 && p <= cfg_->n && !cfg_->is_faulty(p); }
    const std::vector<Pid>& correct_pids() const { return correct_; }

    // First / last correct entry of v.
    std::optional<At> first_entry(View v) const;
    std::optional<Tick> tm(View v) const;
    std::optional<Tick> tl(View v) const;  // latest observed entry
    std::size_t entrants(View v) const;
    // First / last correct AdvanceCall while in v.
    std::optional<At> first_advance(View v) const;
    std::optional<Tick> tam(View v) const;
    std::optional<Tick> talast(View v) const;

    std::optional<At> te(Pid p, View v) const;
    std::optional<At> ta(Pid p, View v) const;
    // Earliest time p advances from v or enters a view above v.
    std::optional<Tick> tae(Pid p, View v) const;
    // Defined only when every correct process has tae(v).
    std::optional<Tick> taelast(View v) const;

    std::optional<Tick> gst_bar() const;
    View sync_view() const;  // Bounded Entry witness
    View max_view() const { return max_view_; }
    const std::vector<View>& entered_views() const { return views_; }

    std::optional<Tick> start_time(Pid p) const;
    // (dur_delivery, dur_recovery) in effect at p just before trace index idx.
    std::pair<Tick, Tick> timeouts_before(Pid p, std::size_t idx) const;
    // Entries of p in trace order.
    const std::vector<std::pair<View, At>>& entries(Pid p) const;

private:
    struct Proc {
        std::vector<std::pair<View, At>> entries;
        std::map<View, At> first_entry;
        std::map<View, At> first_advance;
        std::vector<std::tuple<std::size_t, Tick, Tick>> timeouts;  // idx, delivery, recovery
        std::optional<Tick> start;
    };
    struct ViewStat {
        std::optional<At> first_entry;
        Tick last_entry = 0;
        std::set<Pid> entrants;
        std::optional<At> first_advance;
        Tick last_advance = 0;
    };

    const Proc* proc(Pid p) const;

    const ScenarioConfig* cfg_;
    std::vector<Pid> correct_;
    std::map<Pid, Proc> procs_;
    std::map<View, ViewStat> views_stat_;
    std::vector<View> views_;
    View max_view_ = 0;
};

}  // namespace smr
