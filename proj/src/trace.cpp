#include "smr/trace.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace smr {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<const char*, 17> kKindNames = {
    "Start",    "EnterView",  "AdvanceCall", "WishSent",  "Send",      "Receive",
    "VoteSent", "Deliver",    "BroadcastCall", "TimerStart", "TimerStop", "TimerExpire",
    "MemSample", "EnterConsensusView", "CertAccepted", "LockSet", "Timeouts",
};

enum class Field { V, K, H, A, B, C, Label, Signers };

struct FieldName {
    Field field;
    const char* name;
};

std::vector<FieldName> layout(EventKind k) {
    using F = Field;
    switch (k) {
        case EventKind::Start: return {};
        case EventKind::EnterView:
        case EventKind::EnterConsensusView: return {{F::V, "v"}};
        case EventKind::AdvanceCall: return {{F::V, "v"}, {F::Label, "cause"}};
        case EventKind::WishSent: return {{F::V, "v"}, {F::A, "view"}, {F::B, "view_plus"}};
        case EventKind::Send:
        case EventKind::VoteSent:
            return {{F::Label, "type"}, {F::V, "view"}, {F::K, "position"}, {F::H, "hash"}, {F::A, "signer"}, {F::C, "dest"}};
        case EventKind::Receive:
            return {{F::Label, "type"}, {F::V, "view"}, {F::K, "position"}, {F::H, "hash"}, {F::A, "from"}, {F::B, "sent_at"}};
        case EventKind::Deliver: return {{F::K, "position"}, {F::H, "value"}, {F::A, "valid"}, {F::B, "nop"}};
        case EventKind::BroadcastCall: return {{F::H, "value"}, {F::A, "valid"}};
        case EventKind::TimerStart: return {{F::Label, "id"}, {F::A, "duration"}};
        case EventKind::TimerStop:
        case EventKind::TimerExpire: return {{F::Label, "id"}};
        case EventKind::MemSample: return {{F::A, "sync_entries"}, {F::B, "buffer_slots"}, {F::C, "buffer_messages"}};
        case EventKind::CertAccepted:
            return {{F::Label, "cert"}, {F::V, "view"}, {F::K, "position"}, {F::H, "hash"}, {F::Signers, "signers"}};
        case EventKind::LockSet: return {{F::V, "view"}, {F::K, "position"}, {F::H, "hash"}};
        case EventKind::Timeouts: return {{F::V, "view"}, {F::A, "dur_delivery"}, {F::B, "dur_recovery"}};
    }
    return {};
}

}  // namespace

const char* to_string(EventKind k) { return kKindNames.at(static_cast<std::size_t>(k)); }

EventKind event_kind_from_string(const std::string& s) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (s == kKindNames[i]) return static_cast<EventKind>(i);
    throw std::invalid_argument("unknown event kind '" + s + "'");
}

ordered_json event_to_json(const TraceEvent& e) {
    ordered_json j;
    j["t"] = e.t;
    j["pid"] = e.pid;
    j["kind"] = to_string(e.kind);
    ordered_json data = ordered_json::object();
    for (const auto& [field, name] : layout(e.kind)) {
        switch (field) {
            case Field::V: data[name] = e.v; break;
            case Field::K: data[name] = e.k; break;
            case Field::H: data[name] = e.h; break;
            case Field::A: data[name] = e.a; break;
            case Field::B: data[name] = e.b; break;
            case Field::C: data[name] = e.c; break;
            case Field::Label: data[name] = e.label; break;
            case Field::Signers: data[name] = e.signers; break;
        }
    }
    j["data"] = std::move(data);
    return j;
}

TraceEvent event_from_json(const json& j) {
    TraceEvent e;
    e.t = j.at("t").get<Tick>();
    e.pid = j.at("pid").get<Pid>();
    e.kind = event_kind_from_string(j.at("kind").get<std::string>());
    const json empty = json::object();
    const json& data = j.contains("data") ? j.at("data") : empty;
    for (const auto& [field, name] : layout(e.kind)) {
        if (!data.contains(name)) continue;
        const auto& x = data.at(name);
        switch (field) {
            case Field::V: e.v = x.get<View>(); break;
            case Field::K: e.k = x.get<Pos>(); break;
            case Field::H: e.h = x.get<Hash>(); break;
            case Field::A: e.a = x.get<std::int64_t>(); break;
            case Field::B: e.b = x.get<std::int64_t>(); break;
            case Field::C: e.c = x.get<std::int64_t>(); break;
            case Field::Label: e.label = x.get<std::string>(); break;
            case Field::Signers: e.signers = x.get<std::vector<Pid>>(); break;
        }
    }
    return e;
}

void write_jsonl(std::ostream& out, const Trace& trace) {
    ordered_json header;
    header["format"] = 1;
    header["kind"] = "Header";
    header["config"] = config_to_json(trace.config);
    out << header.dump() << '\n';
    for (const auto& e : trace.events) out << event_to_json(e).dump() << '\n';
}

std::string to_jsonl(const Trace& trace) {
    std::ostringstream os;
    write_jsonl(os, trace);
    return os.str();
}

Trace read_jsonl(std::istream& in, const ScenarioConfig* fallback) {
    Trace trace;
    bool have_config = false;
    if (fallback) {
        trace.config = *fallback;
        have_config = true;
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw TraceParseError(line_no, e.what());
        }
        try {
            if (j.contains("kind") && j.at("kind") == "Header") {
                if (j.value("format", 0) != 1) throw TraceParseError(line_no, "unsupported trace format");
                if (!fallback && j.contains("config")) {
                    trace.config = config_from_json(j.at("config"));
                    have_config = true;
                }
                continue;
            }
            trace.events.push_back(event_from_json(j));
        } catch (const TraceParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw TraceParseError(line_no, e.what());
        }
    }
    if (!have_config) throw TraceParseError(line_no, "no config: trace has no header and none was supplied");
    return trace;
}

Trace load_trace(const std::string& path, const ScenarioConfig* fallback) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace '" + path + "'");
    return read_jsonl(in, fallback);
}

}  // namespace smr
