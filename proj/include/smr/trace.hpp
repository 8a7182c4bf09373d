#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "smr/config.hpp"
#include "smr/types.hpp"

namespace smr {

enum class EventKind : std::uint8_t {
    Start,
    EnterView,
    AdvanceCall,
    WishSent,
    Send,
    Receive,
    VoteSent,
    Deliver,
    BroadcastCall,
    TimerStart,
    TimerStop,
    TimerExpire,
    MemSample,
    EnterConsensusView,
    CertAccepted,
    LockSet,
    Timeouts,
};

const char* to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);

// Flat record; which fields are meaningful depends on kind:
//   EnterView, EnterConsensusView   v
//   AdvanceCall                     v (view advanced from), label = cause
//   WishSent                        v = wished view, a = view, b = view_plus
//   Send                            label = type, v, k, h, a = signer, c = dest (0 = all)
//   Receive                         label = type, v, k, h, a = from, b = sent_at
//   VoteSent                        label = type, v, k, h, a = signer, c = dest (0 = all)
//   Deliver                         k = position, h = value id, a = valid, b = nop
//   BroadcastCall                   h = value id, a = valid
//   TimerStart                      label = timer, a = duration; TimerStop/Expire: label
//   MemSample                       a = synchronizer entries, b = buffer slots, c = buffered messages
//   CertAccepted                    label = kind, v, k, h, signers
//   LockSet                         v = lock view, k, h
//   Timeouts                        v = current view, a = dur_delivery, b = dur_recovery
struct TraceEvent {
    Tick t = 0;
    Pid pid = 0;
    EventKind kind = EventKind::Start;
    View v = 0;
    Pos k = 0;
    Hash h = 0;
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 0;
    std::string label;
    std::vector<Pid> signers;
};

struct Trace {
    ScenarioConfig config;
    std::vector<TraceEvent> events;
};

nlohmann::ordered_json event_to_json(const TraceEvent& e);
TraceEvent event_from_json(const nlohmann::json& j);

void write_jsonl(std::ostream& out, const Trace& trace);
std::string to_jsonl(const Trace& trace);

struct TraceParseError : std::runtime_error {
    TraceParseError(std::size_t line, const std::string& what)
        : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line_no(line) {}
    std::size_t line_no;
};

// The first line may be a header carrying the config; `fallback` is used otherwise.
Trace read_jsonl(std::istream& in, const ScenarioConfig* fallback = nullptr);
Trace load_trace(const std::string& path, const ScenarioConfig* fallback = nullptr);

}  // namespace smr
