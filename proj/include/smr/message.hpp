#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "smr/types.hpp"

namespace smr {

// Value identity doubles as its hash. Id 0 is reserved for nop.
struct Value {
    std::uint64_t id = 0;
    bool valid = true;
    std::string payload;

    bool is_nop() const { return id == 0; }
    friend bool operator==(const Value& a, const Value& b) { return a.id == b.id; }
};

inline Value nop_value() { return Value{0, true, ""}; }
inline Hash hash_of(const Value& x) { return x.id; }

// Value ids encode their origin so adversaries and tests can reason about them.
inline std::uint64_t client_value_id(Pid origin, std::uint64_t seq) {
    return (static_cast<std::uint64_t>(origin) << 40) | seq;
}
inline std::uint64_t forged_value_id(Pid origin, std::uint64_t seq) {
    return (std::uint64_t{1} << 63) | client_value_id(origin, seq);
}
inline Pid value_origin(std::uint64_t id) { return static_cast<Pid>((id >> 40) & 0xFFFFF); }

enum class MsgType : std::uint8_t {
    Wish,
    Broadcast,
    Forward,
    PrePrepare,
    Prepare,
    PreCommit,
    Commit,
    Decision,
    NewLeader,
    NewState,
};
inline constexpr std::size_t kMsgTypeCount = 10;

const char* to_string(MsgType t);
MsgType msg_type_from_string(const std::string& s);
bool is_vote(MsgType t);

struct WishBody {
    View v = 0;
};

struct ValueBody {
    Value x;
};

struct ProposalBody {
    View v = 0;
    Pos k = 0;
    Value x;
};

struct VoteBody {
    MsgType kind = MsgType::Prepare;
    View v = 0;
    Pos k = 0;
    Hash h = 0;
    friend bool operator==(const VoteBody&, const VoteBody&) = default;
};

struct SignedVote {
    VoteBody body;
    Pid signer = 0;
    std::uint64_t tag = 0;
};

struct Certificate {
    MsgType kind = MsgType::Prepare;
    View v = 0;
    Pos k = 0;
    Hash h = 0;
    std::vector<SignedVote> votes;
};

struct PrepReport {
    Pos k = 0;
    View prep_view = 0;
    Value x;
    Certificate cert;
};

struct NewLeaderBody {
    View v = 0;
    std::vector<PrepReport> reports;  // ascending k, prep_view > 0 only
};

struct SignedNewLeader {
    NewLeaderBody body;
    Pid signer = 0;
    std::uint64_t tag = 0;
};

// NEW_STATE of the PBFT family: the new log plus the quorum it was computed from.
struct NewStateBody {
    View v = 0;
    std::vector<std::pair<Pos, Value>> log;  // ascending k, defined entries only
    std::vector<SignedNewLeader> proof;
};

// NEW_STATE of HotStuff-light: per entry value, prepare view and certificate.
struct HsNewStateBody {
    View v = 0;
    std::vector<PrepReport> entries;
};

struct DecisionEntry {
    Value x;
    Pos k = 0;
    Certificate cert;
};

struct DecisionBody {
    std::vector<DecisionEntry> entries;
};

using Body = std::variant<WishBody, ValueBody, ProposalBody, VoteBody, NewLeaderBody, NewStateBody,
                          HsNewStateBody, DecisionBody>;

struct Message {
    MsgType type = MsgType::Wish;
    Pid signer = 0;
    std::uint64_t tag = 0;
    Body body;

    View view() const;  // 0 for view-less types
    Pos position() const;
    Hash hash() const;
};

using MessagePtr = std::shared_ptr<const Message>;

std::uint64_t digest(MsgType type, const Body& body);
std::uint64_t digest(const VoteBody& b);
std::uint64_t digest(const NewLeaderBody& b);

// Simulated signature scheme. Secrets are derived from the seed; only the
// harness hands out a Signer, and only for the owning process.
class KeyRegistry {
public:
    KeyRegistry(std::uint32_t n, std::uint64_t seed);
    std::uint64_t tag_for(Pid signer, std::uint64_t digest) const;
    bool verify(const Message& m) const;
    bool verify(const SignedVote& v) const;
    bool verify(const SignedNewLeader& m) const;
    std::uint32_t n() const { return static_cast<std::uint32_t>(secrets_.size()); }

private:
    std::vector<std::uint64_t> secrets_;
};

class Signer {
public:
    Signer(const KeyRegistry& keys, Pid self) : keys_(&keys), self_(self) {}
    Pid pid() const { return self_; }
    Message sign(MsgType type, Body body) const;
    SignedVote sign_vote(const VoteBody& b) const;
    SignedNewLeader sign_new_leader(NewLeaderBody b) const;

private:
    const KeyRegistry* keys_;
    Pid self_;
};

nlohmann::ordered_json message_summary(const Message& m);

}  // namespace smr
