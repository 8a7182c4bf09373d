#include "smr/sim/simulator.hpp"

#include <queue>
#include <variant>

#include "smr/bft/replica.hpp"
#include "smr/sim/adversary.hpp"
#include "smr/sim/clock.hpp"
#include "smr/sim/network.hpp"
#include "smr/sync/clients.hpp"

namespace smr {

namespace {

enum Stream : std::uint64_t { kSetup = 0, kNetwork = 1, kKeys = 2, kAdversaryBase = 100 };

struct StartEv {};
struct DeliverEv {
    Pid from;
    MessagePtr m;
    Tick sent_at;
};
struct TimerEv {
    TimerId id;
    std::uint64_t gen;
};
struct PeriodicEv {
    std::int64_t m;
};
struct BroadcastEv {};

using Payload = std::variant<StartEv, DeliverEv, TimerEv, PeriodicEv, BroadcastEv>;

struct Event {
    Tick due;
    std::uint64_t seq;
    Pid pid;
    Payload payload;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const {
        return a.due != b.due ? a.due > b.due : a.seq > b.seq;
    }
};

bool level_allows(TraceLevel level, EventKind k) {
    switch (k) {
        case EventKind::Send:
        case EventKind::Receive: return level == TraceLevel::Full;
        case EventKind::WishSent:
        case EventKind::VoteSent:
        case EventKind::CertAccepted:
        case EventKind::LockSet:
        case EventKind::TimerStart:
        case EventKind::TimerStop:
        case EventKind::TimerExpire: return level != TraceLevel::Minimal;
        default: return true;
    }
}

}  // namespace

struct Simulator::Impl {
    struct Node final : Env {
        Impl& sim;
        Pid id;
        LocalClock clock;
        Tick start_at = 0;
        Tick crash_at = kNever;
        Tick phase = 0;
        Signer signer_;
        Synchronizer sync;
        std::unique_ptr<Protocol> proto;
        std::unique_ptr<Adversary> adv;
        std::map<TimerId, std::uint64_t> timers;
        std::uint64_t timer_gen = 0;
        std::int64_t periodic_count = 0;
        std::array<std::int64_t, 3> last_mem{-1, -1, -1};
        std::uint64_t broadcast_seq = 1;
        std::vector<Adversary::Out> scratch;

        Node(Impl& s, Pid p) : sim(s), id(p), signer_(s.keys, p), sync(s.cfg.n, s.cfg.f) {}

        bool alive() const { return sim.now < crash_at; }

        Pid self() const override { return id; }
        const Signer& signer() const override { return signer_; }
        const KeyRegistry& keys() const override { return sim.keys; }

        void send(Pid to, MessagePtr m) override {
            if (!alive()) return;
            if (!adv) {
                sim.record_send(id, *m, to);
                sim.transmit(id, to, std::move(m));
                return;
            }
            scratch.clear();
            adv->outgoing(to, m, scratch);
            for (auto& o : scratch) {
                sim.record_send(id, *o.m, o.to);
                sim.transmit(id, o.to, std::move(o.m));
            }
        }

        void send_all(MessagePtr m) override {
            if (!alive()) return;
            if (adv) {
                for (Pid p = 1; p <= sim.cfg.n; ++p) send(p, m);
                return;
            }
            sim.record_send(id, *m, 0);
            for (Pid p = 1; p <= sim.cfg.n; ++p) sim.transmit(id, p, m);
        }

        void start_timer(TimerId t, Tick duration) override {
            const std::uint64_t g = ++timer_gen;
            timers[t] = g;
            const Tick due = clock.real_when(clock.local(sim.now) + duration);
            sim.push(due, id, TimerEv{t, g});
            TraceEvent e;
            e.kind = EventKind::TimerStart;
            e.label = to_string(t);
            e.a = duration;
            record(std::move(e));
        }

        void stop_timer(TimerId t) override {
            if (timers.erase(t) == 0) return;
            TraceEvent e;
            e.kind = EventKind::TimerStop;
            e.label = to_string(t);
            record(std::move(e));
        }

        void stop_all_timers() override {
            while (!timers.empty()) stop_timer(timers.begin()->first);
        }

        bool timer_active(TimerId t) const override { return timers.contains(t); }

        void advance(AdvanceCause cause) override {
            TraceEvent e;
            e.kind = EventKind::AdvanceCall;
            e.v = sync.state().last_entered;
            e.label = to_string(cause);
            record(std::move(e));
            apply(sync.advance());
        }

        void deliver(const Value& x, Pos k) override {
            TraceEvent e;
            e.kind = EventKind::Deliver;
            e.k = k;
            e.h = x.id;
            e.a = x.valid;
            e.b = x.is_nop();
            record(std::move(e));
        }

        void consensus_view(View v) override {
            TraceEvent e;
            e.kind = EventKind::EnterConsensusView;
            e.v = v;
            record(std::move(e));
        }

        void record(TraceEvent e) override { sim.record(id, std::move(e)); }

        void apply(const SyncOutput& out) {
            if (out.entered) {
                TraceEvent e;
                e.kind = EventKind::EnterView;
                e.v = *out.entered;
                record(std::move(e));
                proto->on_new_view(*out.entered);
            }
            for (View w : out.wishes) {
                TraceEvent e;
                e.kind = EventKind::WishSent;
                e.v = w;
                e.a = static_cast<std::int64_t>(sync.state().view);
                e.b = static_cast<std::int64_t>(sync.state().view_plus);
                record(std::move(e));
                send_all(std::make_shared<const Message>(signer_.sign(MsgType::Wish, WishBody{w})));
            }
        }

        void on_periodic() {
            apply(sync.periodic());
            proto->on_periodic();
            if (adv) {
                scratch.clear();
                adv->periodic(sync.state().last_entered, scratch);
                auto extra = std::move(scratch);
                for (auto& o : extra) {
                    sim.record_send(id, *o.m, o.to);
                    sim.transmit(id, o.to, std::move(o.m));
                }
            }
            if (++periodic_count % std::max<std::int64_t>(1, sim.cfg.mem_sample_every) != 0) return;
            const std::array<std::int64_t, 3> mem{static_cast<std::int64_t>(sync.stored_entries()),
                                                  static_cast<std::int64_t>(proto->buffer_slots()),
                                                  static_cast<std::int64_t>(proto->buffered_messages())};
            if (mem == last_mem) return;
            last_mem = mem;
            TraceEvent e;
            e.kind = EventKind::MemSample;
            e.a = mem[0];
            e.b = mem[1];
            e.c = mem[2];
            record(std::move(e));
        }
    };

    ScenarioConfig cfg;
    KeyRegistry keys;
    Network net;
    Rng setup;
    Trace trace;
    RunStats stats;
    Tick now = 0;
    std::uint64_t seq = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue;
    std::vector<std::unique_ptr<Node>> nodes;  // index pid - 1

    explicit Impl(const ScenarioConfig& c)
        : cfg(c), keys(c.n, derive_seed(c.seed, kKeys)), net(cfg, derive_seed(c.seed, kNetwork)),
          setup(derive_seed(c.seed, kSetup)) {
        validate(cfg);
        trace.config = cfg;
        build_nodes();
        schedule_workload();
    }

    ReplicaParams params() const {
        ReplicaParams p;
        p.n = cfg.n;
        p.f = cfg.f;
        p.delta_cap = cfg.delta_cap;
        p.rho = cfg.rho;
        p.tau = cfg.tau;
        p.t_broadcast = cfg.t_broadcast;
        p.batch = cfg.batch;
        p.init_dur_delivery = cfg.init_dur_delivery;
        p.init_dur_recovery = cfg.init_dur_recovery;
        p.latency_mode = cfg.latency_mode;
        p.view_unit = cfg.view_unit();
        return p;
    }

    std::unique_ptr<Protocol> make_protocol(Env& env) const {
        const auto p = params();
        switch (cfg.protocol) {
            case ProtocolKind::PbftLight: return std::make_unique<PbftLight>(p, env);
            case ProtocolKind::PbftRotation: return std::make_unique<PbftRotation>(p, env);
            case ProtocolKind::HotstuffLight: return std::make_unique<HotstuffLight>(p, env);
            case ProtocolKind::ToyClient: return std::make_unique<ToyClient>(p, env);
            case ProtocolKind::ConsensusSync: return std::make_unique<ConsensusSync>(p, env);
        }
        throw std::logic_error("unknown protocol");
    }

    void build_nodes() {
        const FaultDirective* random_drift = nullptr;
        for (const auto& d : cfg.fault_plan)
            if (d.kind == FaultDirective::Kind::RandomDrift) random_drift = &d;
        for (Pid p = 1; p <= cfg.n; ++p) {
            auto node = std::make_unique<Node>(*this, p);
            Rational rate{1, 1};
            if (!cfg.drift.empty())
                rate = cfg.drift[p - 1];
            else if (random_drift)
                rate = Rational(setup.uniform(random_drift->min_num, random_drift->max_num), random_drift->den);
            node->clock = LocalClock(rate, cfg.gst);
            node->start_at = cfg.start_times.empty() ? setup.uniform(cfg.start_lo, cfg.start_hi) : cfg.start_times[p - 1];
            node->phase = setup.uniform(0, cfg.rho - 1);
            if (auto c = cfg.crash_time(p)) node->crash_at = *c;
            node->proto = make_protocol(*node);
            if (cfg.is_faulty(p) && !cfg.behaviors_of(p).empty())
                node->adv = std::make_unique<Adversary>(cfg, p, keys, derive_seed(cfg.seed, kAdversaryBase + p));
            push(node->start_at, p, StartEv{});
            push(node->clock.real_when(node->phase), p, PeriodicEv{0});
            nodes.push_back(std::move(node));
        }
    }

    void schedule_workload() {
        for (Pid p = 1; p <= cfg.n; ++p) {
            if (cfg.is_faulty(p)) continue;
            for (int i = 0; i < cfg.workload.per_process; ++i)
                push(setup.uniform(cfg.workload.window_lo, cfg.workload.window_hi), p, BroadcastEv{});
        }
        for (const auto& b : cfg.workload.explicit_broadcasts) push(b.at, b.pid, BroadcastEv{});
    }

    void push(Tick due, Pid pid, Payload payload) {
        if (due > cfg.horizon) return;
        queue.push(Event{due, seq++, pid, std::move(payload)});
    }

    void record(Pid pid, TraceEvent e) {
        if (!level_allows(cfg.trace_level, e.kind)) return;
        e.t = now;
        e.pid = pid;
        trace.events.push_back(std::move(e));
    }

    void record_send(Pid from, const Message& m, Pid dest) {
        const bool vote = is_vote(m.type);
        if (!(vote && cfg.trace_level != TraceLevel::Minimal) && cfg.trace_level != TraceLevel::Full) return;
        TraceEvent e;
        e.label = to_string(m.type);
        e.v = m.view();
        e.k = m.position();
        e.h = m.hash();
        e.a = m.signer;
        e.c = dest;
        if (vote) {
            e.kind = EventKind::VoteSent;
            record(from, e);
        }
        if (cfg.trace_level == TraceLevel::Full) {
            e.kind = EventKind::Send;
            record(from, std::move(e));
        }
    }

    void transmit(Pid from, Pid to, MessagePtr m) {
        ++stats.messages_sent;
        auto due = net.deliver_time(now, from, to);
        if (!due) {
            ++stats.messages_dropped;
            return;
        }
        push(*due, to, DeliverEv{from, std::move(m), now});
    }

    void handle(Node& node, const Event& ev) {
        if (!node.alive()) return;
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, StartEv>) {
                    TraceEvent e;
                    e.kind = EventKind::Start;
                    node.record(std::move(e));
                    node.proto->start();
                } else if constexpr (std::is_same_v<T, DeliverEv>) {
                    receive(node, p);
                } else if constexpr (std::is_same_v<T, TimerEv>) {
                    auto it = node.timers.find(p.id);
                    if (it == node.timers.end() || it->second != p.gen) return;
                    node.timers.erase(it);
                    TraceEvent e;
                    e.kind = EventKind::TimerExpire;
                    e.label = to_string(p.id);
                    node.record(std::move(e));
                    node.proto->on_timer(p.id);
                } else if constexpr (std::is_same_v<T, PeriodicEv>) {
                    push(node.clock.real_when(node.phase + (p.m + 1) * cfg.rho), node.id, PeriodicEv{p.m + 1});
                    node.on_periodic();
                } else {
                    Value x{client_value_id(node.id, node.broadcast_seq++), true, "v"};
                    TraceEvent e;
                    e.kind = EventKind::BroadcastCall;
                    e.h = x.id;
                    e.a = 1;
                    node.record(std::move(e));
                    node.proto->broadcast(x);
                }
            },
            ev.payload);
    }

    void receive(Node& node, const DeliverEv& d) {
        const Message& m = *d.m;
        if (node.adv) node.adv->observe(m);
        if (cfg.trace_level == TraceLevel::Full) {
            TraceEvent e;
            e.kind = EventKind::Receive;
            e.label = to_string(m.type);
            e.v = m.view();
            e.k = m.position();
            e.h = m.hash();
            e.a = d.from;
            e.b = d.sent_at;
            node.record(std::move(e));
        }
        if (m.type == MsgType::Wish) {
            const auto* w = std::get_if<WishBody>(&m.body);
            if (w && m.signer == d.from && keys.verify(m)) node.apply(node.sync.handle_wish(d.from, w->v));
            return;
        }
        node.proto->on_message(d.from, m);
    }

    void run_until(Tick t) {
        const Tick limit = std::min(t, cfg.horizon);
        while (!queue.empty() && queue.top().due <= limit) {
            Event ev = queue.top();
            queue.pop();
            now = ev.due;
            ++stats.events;
            handle(*nodes[ev.pid - 1], ev);
        }
        now = std::max(now, limit);
    }
};

Simulator::Simulator(const ScenarioConfig& cfg) : impl_(std::make_unique<Impl>(cfg)) {}
Simulator::~Simulator() = default;

void Simulator::run() { impl_->run_until(impl_->cfg.horizon); }
void Simulator::run_until(Tick t) { impl_->run_until(t); }
Tick Simulator::now() const { return impl_->now; }
const Trace& Simulator::trace() const { return impl_->trace; }
Trace Simulator::take_trace() { return std::move(impl_->trace); }
const RunStats& Simulator::stats() const { return impl_->stats; }
Protocol& Simulator::protocol(Pid p) { return *impl_->nodes.at(p - 1)->proto; }
const Synchronizer& Simulator::synchronizer(Pid p) const { return impl_->nodes.at(p - 1)->sync; }
Tick Simulator::start_time(Pid p) const { return impl_->nodes.at(p - 1)->start_at; }

Trace run_scenario(const ScenarioConfig& cfg) {
    Simulator sim(cfg);
    sim.run();
    return sim.take_trace();
}

}  // namespace smr
