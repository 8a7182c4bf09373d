#pragma once

#include <compare>
#include <string>

#include "smr/message.hpp"
#include "smr/trace.hpp"

namespace smr {

enum class TimerKind : std::uint8_t { Delivery, Recovery, Broadcast, View, Toy };

struct TimerId {
    TimerKind kind = TimerKind::Toy;
    std::uint64_t key = 0;  // value id for per-value delivery timers
    auto operator<=>(const TimerId&) const = default;
};

std::string to_string(TimerId id);

enum class AdvanceCause { Start, Timer, Batch, BatchAtInit };
const char* to_string(AdvanceCause c);

// Parameters a replica may see. GST and delta stay with the harness.
struct ReplicaParams {
    std::uint32_t n = 4;
    std::uint32_t f = 1;
    Tick delta_cap = 1;
    Tick rho = 1;
    Tick tau = 1;
    Tick t_broadcast = 1;
    std::uint64_t batch = 1;
    Tick init_dur_delivery = 1;
    Tick init_dur_recovery = 1;
    bool latency_mode = false;
    Tick view_unit = 1;  // consensus-sync F(v) = v * view_unit

    std::uint32_t quorum() const { return 2 * f + 1; }
};

// Everything a protocol instance can do to the outside world.
class Env {
public:
    virtual ~Env() = default;
    virtual Pid self() const = 0;
    virtual const Signer& signer() const = 0;
    virtual const KeyRegistry& keys() const = 0;
    virtual void send(Pid to, MessagePtr m) = 0;
    virtual void send_all(MessagePtr m) = 0;
    void send(Pid to, Message m) { send(to, std::make_shared<const Message>(std::move(m))); }
    void send_all(Message m) { send_all(std::make_shared<const Message>(std::move(m))); }
    virtual void start_timer(TimerId id, Tick duration) = 0;
    virtual void stop_timer(TimerId id) = 0;
    virtual void stop_all_timers() = 0;
    virtual bool timer_active(TimerId id) const = 0;
    virtual void advance(AdvanceCause cause) = 0;
    virtual void deliver(const Value& x, Pos k) = 0;
    virtual void consensus_view(View v) = 0;
    virtual void record(TraceEvent e) = 0;  // t and pid are filled in by the harness
};

class Protocol {
public:
    virtual ~Protocol() = default;
    virtual void start() = 0;
    virtual void on_new_view(View v) = 0;
    virtual void on_message(Pid from, const Message& m) = 0;
    virtual void on_timer(TimerId id) = 0;
    virtual void on_periodic() {}
    virtual void broadcast(const Value&) {}
    virtual std::size_t buffer_slots() const { return 0; }
    virtual std::size_t buffered_messages() const { return 0; }
};

}  // namespace smr
