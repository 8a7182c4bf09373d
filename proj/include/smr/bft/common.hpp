#pragma once

#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "smr/message.hpp"
#include "smr/protocol.hpp"

namespace smr {

// True iff `c` consists of correctly signed `kind`(v, k, h) votes from at
// least `quorum` distinct processes, and nothing else.
bool check_cert(const KeyRegistry& keys, const Certificate& c, MsgType kind, View v, Pos k, Hash h,
                std::uint32_t quorum);
inline bool check_prepared(const KeyRegistry& keys, const Certificate& c, View v, Pos k, Hash h, std::uint32_t q) {
    return check_cert(keys, c, MsgType::Prepare, v, k, h, q);
}
inline bool check_precommit(const KeyRegistry& keys, const Certificate& c, View v, Pos k, Hash h, std::uint32_t q) {
    return check_cert(keys, c, MsgType::PreCommit, v, k, h, q);
}
inline bool check_committed(const KeyRegistry& keys, const Certificate& c, View v, Pos k, Hash h, std::uint32_t q) {
    return check_cert(keys, c, MsgType::Commit, v, k, h, q);
}

std::vector<Pid> cert_signers(const Certificate& c);
TraceEvent cert_event(const Certificate& c);

// Votes of the current view, grouped by (type, position, hash).
class VoteStore {
public:
    void reset() { votes_.clear(); }
    bool add(const SignedVote& sv);
    std::optional<Certificate> quorum(MsgType kind, Pos k, Hash h, std::uint32_t q) const;
    // Hashes that have at least q votes of `kind` at position k.
    std::vector<Hash> hashes_with_quorum(MsgType kind, Pos k, std::uint32_t q) const;
    std::size_t size() const { return votes_.size(); }

private:
    std::map<std::tuple<MsgType, Pos, Hash>, std::map<Pid, SignedVote>> votes_;
};

// Future-view messages, one slot per (type, sender) holding that sender's
// highest view; within the slot one message per position.
class FutureBuffer {
public:
    void add(Pid from, const Message& m, View current_view);
    // Removes and returns the messages for view v in deterministic order;
    // slots for lower views are discarded.
    std::vector<std::pair<Pid, Message>> take(View v);
    std::size_t slots() const { return slots_.size(); }
    std::size_t messages() const;
    std::optional<View> slot_view(MsgType t, Pid from) const;

private:
    struct Slot {
        View v = 0;
        std::map<Pos, Message> msgs;
    };
    std::map<std::pair<MsgType, Pid>, Slot> slots_;
};

// A position's winning report: value prepared in the highest view.
struct Selected {
    Value x;
    View prep_view = 0;
    const Certificate* cert = nullptr;
};

// Highest-prep_view report per position across `m`; ties go to the lowest signer.
std::map<Pos, Selected> select_highest(const std::vector<SignedNewLeader>& m);

// Fills holes below `next` with nop and replaces a value with nop when the same
// value sits at another position with a strictly higher prepare view.
std::map<Pos, Value> fill_log(const std::map<Pos, Selected>& selected, Pos next);

bool valid_new_leader(const KeyRegistry& keys, const SignedNewLeader& m, View v, std::uint32_t quorum);

// PBFT-family log recomputation from a NEW_LEADER quorum. `rotation_batch` = 0
// selects PBFT-light's next (max defined + 1); otherwise next = (v-1)*B + 1.
struct NewLog {
    std::map<Pos, Value> log;
    Pos next = 1;
};
NewLog compute_new_log(const std::vector<SignedNewLeader>& m, View v, std::uint64_t rotation_batch);

std::vector<std::pair<Pos, Value>> as_entries(const std::map<Pos, Value>& log);

}  // namespace smr
