#pragma once

#include <map>
#include <vector>

#include "smr/config.hpp"
#include "smr/message.hpp"
#include "smr/sim/rng.hpp"

namespace smr {

// Rewrites the outgoing traffic of one Byzantine process and injects extra
// messages. It holds only that process's own signing key.
class Adversary {
public:
    Adversary(const ScenarioConfig& cfg, Pid self, const KeyRegistry& keys, std::uint64_t seed);

    struct Out {
        Pid to;
        MessagePtr m;
    };

    // Messages that actually leave for `to` in place of `m`.
    void outgoing(Pid to, const MessagePtr& m, std::vector<Out>& out);
    // Traffic injected on every periodic tick.
    void periodic(View current, std::vector<Out>& out);
    void observe(const Message& m);

    bool has(Behavior b) const;

private:
    MessagePtr equivocate(Pid to, const MessagePtr& m);
    MessagePtr stale_new_leader(const MessagePtr& m);
    Value forged_for(View v, Pos k);

    const ScenarioConfig& cfg_;
    Pid self_;
    const KeyRegistry& keys_;
    Signer signer_;
    Rng rng_;
    std::vector<Behavior> behaviors_;
    Pid censor_target_ = 0;

    std::uint64_t forged_seq_ = 1;
    std::map<std::pair<View, Pos>, Value> forged_;
    std::map<View, std::map<Pid, SignedNewLeader>> new_leaders_;  // received, by view
    std::map<View, std::map<Pid, MessagePtr>> alt_new_state_;
    std::map<Pos, PrepReport> oldest_reports_;
    std::vector<MessagePtr> old_votes_;
    View spam_view_ = View{1} << 20;
    View vote_spam_view_ = 1000;
};

}  // namespace smr
