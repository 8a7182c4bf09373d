#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "smr/check/checker.hpp"

namespace smr {

struct RunSummary {
    std::uint64_t seed = 0;
    bool ok = false;
    std::size_t pass = 0, fail = 0, not_applicable = 0;
    std::string failed;  // comma-separated failing or premise-missing properties
    View sync_view = 0;
    std::optional<Tick> entry_latency;  // tl(sync view) - GST
    std::size_t values = 0;             // correct broadcasts delivered everywhere
    std::optional<double> mean_delivery;
    std::optional<Tick> max_delivery;
    std::size_t events = 0;
};

RunSummary summarize(const Trace& trace, const CheckReport& report, bool strict_premises);

// Runs and checks cfg for every seed in [lo, hi], in parallel; rows come back in seed order.
std::vector<RunSummary> sweep(const ScenarioConfig& cfg, std::uint64_t lo, std::uint64_t hi, bool strict_premises,
                              unsigned threads = 0);

void write_csv(std::ostream& out, const std::vector<RunSummary>& rows);

}  // namespace smr
