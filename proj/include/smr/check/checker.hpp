#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smr/trace.hpp"

namespace smr {

enum class Verdict { Pass, Fail, NotApplicable };
const char* to_string(Verdict v);

struct CheckResult {
    std::string property;
    Verdict verdict = Verdict::Pass;
    std::string detail;
    std::vector<std::size_t> witness;  // trace event indices
    std::optional<Tick> bound;
    std::optional<Tick> observed;
    std::size_t instances = 0;  // premise instances actually checked
};

struct CheckReport {
    std::string scenario;
    std::vector<CheckResult> results;
    // Properties the scenario promises to exercise that came back not applicable.
    std::vector<std::string> unmet_premises;

    std::size_t count(Verdict v) const;
    // All pass, or are not applicable when premises are not strict; promised
    // premises always count.
    bool ok(bool strict_premises) const;
    const CheckResult* find(const std::string& property) const;
    nlohmann::ordered_json to_json(const Trace& trace) const;
    std::string table() const;
};

struct CheckOptions {
    // Property ids or group prefixes ("sync", "cert", ...). Empty: the trace
    // config's list, then the protocol defaults.
    std::vector<std::string> only;
};

const std::vector<std::string>& all_properties();
std::vector<std::string> default_properties(ProtocolKind p);
// Expands ids and group prefixes; throws std::invalid_argument on unknown names.
std::vector<std::string> select_properties(const std::vector<std::string>& selection);

CheckReport check_trace(const Trace& trace, const CheckOptions& opts = {});

}  // namespace smr
