#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "smr/bft/replica.hpp"
#include "smr/protocol.hpp"

namespace smr::testing {

// Records everything a protocol asks of the outside world.
class FakeEnv : public Env {
public:
    struct Sent {
        Pid to;  // 0: all
        MessagePtr m;
    };

    FakeEnv(Pid self, const KeyRegistry& keys) : self_(self), keys_(keys), signer_(keys, self) {}

    Pid self() const override { return self_; }
    const Signer& signer() const override { return signer_; }
    const KeyRegistry& keys() const override { return keys_; }
    void send(Pid to, MessagePtr m) override { sent.push_back({to, std::move(m)}); }
    void send_all(MessagePtr m) override { sent.push_back({0, std::move(m)}); }
    void start_timer(TimerId id, Tick d) override {
        timers[id] = d;
        started.emplace_back(id, d);
    }
    void stop_timer(TimerId id) override { timers.erase(id); }
    void stop_all_timers() override { timers.clear(); }
    bool timer_active(TimerId id) const override { return timers.contains(id); }
    void advance(AdvanceCause c) override { advances.push_back(c); }
    void deliver(const Value& x, Pos k) override { delivered.emplace_back(k, x); }
    void consensus_view(View v) override { consensus_views.push_back(v); }
    void record(TraceEvent e) override { events.push_back(std::move(e)); }

    std::vector<Sent> of_type(MsgType t) const {
        std::vector<Sent> out;
        for (const auto& s : sent)
            if (s.m->type == t) out.push_back(s);
        return out;
    }
    void clear() {
        sent.clear();
        advances.clear();
        started.clear();
    }

    std::vector<Sent> sent;
    std::map<TimerId, Tick> timers;
    std::vector<std::pair<TimerId, Tick>> started;
    std::vector<AdvanceCause> advances;
    std::vector<std::pair<Pos, Value>> delivered;
    std::vector<View> consensus_views;
    std::vector<TraceEvent> events;

private:
    Pid self_;
    const KeyRegistry& keys_;
    Signer signer_;
};

inline ReplicaParams params(std::uint64_t batch = 2) {
    ReplicaParams p;
    p.n = 4;
    p.f = 1;
    p.delta_cap = 4;
    p.rho = 10;
    p.tau = 4;
    p.t_broadcast = 8;
    p.batch = batch;
    p.init_dur_delivery = 16;
    p.init_dur_recovery = 24;
    return p;
}

inline Value val(Pid origin, std::uint64_t seq) { return Value{client_value_id(origin, seq), true, "v"}; }

// n replicas wired by an instant, lossless FIFO network; views are driven by
// the test instead of a synchronizer.
template <class P>
class Cluster {
public:
    explicit Cluster(const ReplicaParams& p, std::uint64_t seed = 7) : keys(p.n, seed) {
        for (Pid i = 1; i <= p.n; ++i) {
            envs.push_back(std::make_unique<FakeEnv>(i, keys));
            nodes.push_back(std::make_unique<P>(p, *envs.back()));
        }
    }

    FakeEnv& env(Pid i) { return *envs[i - 1]; }
    P& node(Pid i) { return *nodes[i - 1]; }
    std::uint32_t n() const { return static_cast<std::uint32_t>(nodes.size()); }

    void enter_view(View v) {
        for (Pid i = 1; i <= n(); ++i)
            if (!silent.contains(i)) node(i).on_new_view(v);
    }

    // Moves outgoing messages into the network and delivers until quiet.
    void run(std::size_t max_steps = 1'000'000) {
        for (std::size_t step = 0; step < max_steps; ++step) {
            collect();
            if (queue.empty()) return;
            auto [from, to, m] = queue.front();
            queue.pop_front();
            if (silent.contains(to) || (drop && drop(from, to, *m))) continue;
            node(to).on_message(from, *m);
        }
    }

    // Every message handed to the network, in order.
    std::vector<std::tuple<Pid, Pid, MessagePtr>> history;
    std::size_t count(MsgType t, Pid from = 0) const {
        std::size_t c = 0;
        for (const auto& [f, to, m] : history)
            if (m->type == t && (from == 0 || f == from)) ++c;
        return c;
    }

    std::set<Pid> silent;  // crashed: neither send nor receive
    std::function<bool(Pid, Pid, const Message&)> drop;
    KeyRegistry keys;

private:
    void collect() {
        for (Pid i = 1; i <= n(); ++i) {
            auto& e = env(i);
            for (const auto& s : e.sent) {
                if (silent.contains(i)) continue;
                if (s.to == 0)
                    for (Pid j = 1; j <= n(); ++j) queue.emplace_back(i, j, s.m);
                else
                    queue.emplace_back(i, s.to, s.m);
                history.emplace_back(i, s.to, s.m);
            }
            e.sent.clear();
        }
    }

    std::vector<std::unique_ptr<FakeEnv>> envs;
    std::vector<std::unique_ptr<P>> nodes;
    std::deque<std::tuple<Pid, Pid, MessagePtr>> queue;
};

}  // namespace smr::testing
