#include "smr/sweep.hpp"

#include <atomic>
#include <map>
#include <ostream>
#include <thread>

#include "smr/check/metrics.hpp"
#include "smr/sim/simulator.hpp"

namespace smr {

RunSummary summarize(const Trace& trace, const CheckReport& report, bool strict_premises) {
    RunSummary s;
    s.seed = trace.config.seed;
    s.ok = report.ok(strict_premises);
    s.pass = report.count(Verdict::Pass);
    s.fail = report.count(Verdict::Fail);
    s.not_applicable = report.count(Verdict::NotApplicable);
    for (const auto& r : report.results)
        if (r.verdict == Verdict::Fail) s.failed += (s.failed.empty() ? "" : ",") + r.property;
    for (const auto& id : report.unmet_premises) s.failed += (s.failed.empty() ? "" : ",") + id + "(premise)";
    s.events = trace.events.size();

    const TraceMetrics m(trace);
    s.sync_view = m.sync_view();
    if (auto tl = m.tl(s.sync_view)) s.entry_latency = *tl - trace.config.gst;

    std::map<Hash, Tick> sent;
    std::map<Hash, std::pair<std::size_t, Tick>> got;  // deliveries by correct processes, latest time
    for (const auto& e : trace.events) {
        if (!m.correct(e.pid)) continue;
        if (e.kind == EventKind::BroadcastCall) sent.try_emplace(e.h, e.t);
        if (e.kind == EventKind::Deliver && !e.b) {
            auto& g = got[e.h];
            ++g.first;
            g.second = std::max(g.second, e.t);
        }
    }
    double total = 0;
    for (const auto& [x, t] : sent) {
        auto it = got.find(x);
        if (it == got.end() || it->second.first < m.correct_pids().size()) continue;
        const Tick lat = it->second.second - t;
        ++s.values;
        total += static_cast<double>(lat);
        s.max_delivery = std::max(s.max_delivery.value_or(lat), lat);
    }
    if (s.values) s.mean_delivery = total / static_cast<double>(s.values);
    return s;
}

std::vector<RunSummary> sweep(const ScenarioConfig& cfg, std::uint64_t lo, std::uint64_t hi, bool strict_premises,
                              unsigned threads) {
    if (hi < lo) return {};
    const std::size_t count = hi - lo + 1;
    std::vector<RunSummary> rows(count);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            ScenarioConfig c = cfg;
            c.seed = lo + i;
            const Trace tr = run_scenario(c);
            rows[i] = summarize(tr, check_trace(tr), strict_premises);
        }
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();  // join before handing rows out
    return rows;
}

void write_csv(std::ostream& out, const std::vector<RunSummary>& rows) {
    out << "seed,ok,pass,fail,not_applicable,sync_view,entry_latency,values_delivered,mean_delivery_latency,"
           "max_delivery_latency,events,failed\n";
    auto opt = [&](const auto& o) {
        if (o) out << *o;
    };
    for (const auto& r : rows) {
        out << r.seed << ',' << (r.ok ? 1 : 0) << ',' << r.pass << ',' << r.fail << ',' << r.not_applicable << ','
            << r.sync_view << ',';
        opt(r.entry_latency);
        out << ',' << r.values << ',';
        opt(r.mean_delivery);
        out << ',';
        opt(r.max_delivery);
        out << ',' << r.events << ",\"" << r.failed << "\"\n";
    }
}

}  // namespace smr
