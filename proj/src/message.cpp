#include "smr/message.hpp"

#include <array>
#include <stdexcept>

namespace smr {

namespace {

constexpr std::array<const char*, kMsgTypeCount> kTypeNames = {
    "WISH", "BROADCAST", "FORWARD", "PREPREPARE", "PREPARE", "PRECOMMIT", "COMMIT", "DECISION", "NEW_LEADER", "NEW_STATE",
};

std::uint64_t mix(std::uint64_t h, std::uint64_t x) {
    // splitmix64 finalizer over the running state
    std::uint64_t z = h ^ (x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t digest_value(std::uint64_t h, const Value& x) {
    h = mix(h, x.id);
    h = mix(h, x.valid ? 1 : 0);
    return mix(h, fnv1a(x.payload));
}

std::uint64_t digest_cert(std::uint64_t h, const Certificate& c) {
    h = mix(h, static_cast<std::uint64_t>(c.kind));
    h = mix(h, c.v);
    h = mix(h, c.k);
    h = mix(h, c.h);
    for (const auto& sv : c.votes) {
        h = mix(h, digest(sv.body));
        h = mix(h, sv.signer);
        h = mix(h, sv.tag);
    }
    return h;
}

std::uint64_t digest_report(std::uint64_t h, const PrepReport& r) {
    h = mix(h, r.k);
    h = mix(h, r.prep_view);
    h = digest_value(h, r.x);
    return digest_cert(h, r.cert);
}

}  // namespace

const char* to_string(MsgType t) { return kTypeNames.at(static_cast<std::size_t>(t)); }

MsgType msg_type_from_string(const std::string& s) {
    for (std::size_t i = 0; i < kTypeNames.size(); ++i)
        if (s == kTypeNames[i]) return static_cast<MsgType>(i);
    throw std::invalid_argument("unknown message type '" + s + "'");
}

bool is_vote(MsgType t) { return t == MsgType::Prepare || t == MsgType::PreCommit || t == MsgType::Commit; }

View Message::view() const {
    return std::visit(
        [](const auto& b) -> View {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, ValueBody> || std::is_same_v<B, DecisionBody>)
                return 0;
            else
                return b.v;
        },
        body);
}

Pos Message::position() const {
    if (auto* p = std::get_if<ProposalBody>(&body)) return p->k;
    if (auto* v = std::get_if<VoteBody>(&body)) return v->k;
    return 0;
}

Hash Message::hash() const {
    if (auto* p = std::get_if<ProposalBody>(&body)) return hash_of(p->x);
    if (auto* v = std::get_if<VoteBody>(&body)) return v->h;
    if (auto* x = std::get_if<ValueBody>(&body)) return hash_of(x->x);
    return 0;
}

std::uint64_t digest(const VoteBody& b) {
    std::uint64_t h = mix(0x766f7465, static_cast<std::uint64_t>(b.kind));
    h = mix(h, b.v);
    h = mix(h, b.k);
    return mix(h, b.h);
}

std::uint64_t digest(const NewLeaderBody& b) {
    std::uint64_t h = mix(0x6e6c, b.v);
    for (const auto& r : b.reports) h = digest_report(h, r);
    return h;
}

std::uint64_t digest(MsgType type, const Body& body) {
    std::uint64_t h = mix(0x736d72, static_cast<std::uint64_t>(type));
    return std::visit(
        [&](const auto& b) -> std::uint64_t {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, WishBody>) {
                return mix(h, b.v);
            } else if constexpr (std::is_same_v<B, ValueBody>) {
                return digest_value(h, b.x);
            } else if constexpr (std::is_same_v<B, ProposalBody>) {
                return digest_value(mix(mix(h, b.v), b.k), b.x);
            } else if constexpr (std::is_same_v<B, VoteBody>) {
                return digest(b);
            } else if constexpr (std::is_same_v<B, NewLeaderBody>) {
                return digest(b);
            } else if constexpr (std::is_same_v<B, NewStateBody>) {
                h = mix(h, b.v);
                for (const auto& [k, x] : b.log) h = digest_value(mix(h, k), x);
                for (const auto& m : b.proof) h = mix(mix(h, m.tag), m.signer);
                return h;
            } else if constexpr (std::is_same_v<B, HsNewStateBody>) {
                h = mix(h, b.v);
                for (const auto& r : b.entries) h = digest_report(h, r);
                return h;
            } else {
                return h;  // DECISION carries its own proof and is not signed
            }
        },
        body);
}

KeyRegistry::KeyRegistry(std::uint32_t n, std::uint64_t seed) {
    secrets_.reserve(n);
    for (std::uint32_t p = 1; p <= n; ++p) secrets_.push_back(mix(mix(seed, 0x6b6579), p));
}

std::uint64_t KeyRegistry::tag_for(Pid signer, std::uint64_t d) const {
    if (signer < 1 || signer > secrets_.size()) return 0;
    return mix(d, secrets_[signer - 1]);
}

bool KeyRegistry::verify(const Message& m) const {
    if (m.type == MsgType::Decision) return true;
    if (m.signer < 1 || m.signer > secrets_.size()) return false;
    return m.tag == tag_for(m.signer, digest(m.type, m.body));
}

bool KeyRegistry::verify(const SignedVote& v) const {
    if (v.signer < 1 || v.signer > secrets_.size()) return false;
    return v.tag == tag_for(v.signer, digest(v.body));
}

bool KeyRegistry::verify(const SignedNewLeader& m) const {
    if (m.signer < 1 || m.signer > secrets_.size()) return false;
    return m.tag == tag_for(m.signer, digest(m.body));
}

Message Signer::sign(MsgType type, Body body) const {
    Message m{type, self_, 0, std::move(body)};
    if (type != MsgType::Decision) m.tag = keys_->tag_for(self_, digest(m.type, m.body));
    return m;
}

SignedVote Signer::sign_vote(const VoteBody& b) const { return SignedVote{b, self_, keys_->tag_for(self_, digest(b))}; }

SignedNewLeader Signer::sign_new_leader(NewLeaderBody b) const {
    auto tag = keys_->tag_for(self_, digest(b));
    return SignedNewLeader{std::move(b), self_, tag};
}

nlohmann::ordered_json message_summary(const Message& m) {
    nlohmann::ordered_json j;
    j["type"] = to_string(m.type);
    if (m.type == MsgType::Wish) {
        j["v"] = std::get<WishBody>(m.body).v;
    } else {
        if (m.view()) j["view"] = m.view();
        if (m.position()) j["position"] = m.position();
        if (m.hash()) j["hash"] = m.hash();
        if (auto* d = std::get_if<DecisionBody>(&m.body)) j["entries"] = d->entries.size();
    }
    j["signer"] = m.signer;
    j["sig"] = m.tag;
    return j;
}

}  // namespace smr
