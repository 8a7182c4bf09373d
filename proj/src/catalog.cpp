#include "smr/catalog.hpp"

#include <stdexcept>

namespace smr {

namespace {

using json = nlohmann::json;

// Shared timing: n = 4, f = 1, delta = 2, Delta = 4, rho = 10.
json base(const char* protocol) {
    return json{{"format", 1}, {"protocol", protocol}, {"n", 4},   {"f", 1},     {"delta", 2},
                {"delta_cap", 4}, {"rho", 10},          {"tau", 4}, {"seed", 0}};
}

json chaos(double drop) {
    return json::array({json{{"kind", "drop"}, {"probability", drop}},
                        json{{"kind", "delay"}, {"max", 16}},
                        json{{"kind", "random_drift"}, {"min_num", 1}, {"max_num", 3}, {"den", 2}}});
}

json byz(int pid, const char* behavior) { return json{{"kind", "byzantine"}, {"pid", pid}, {"behavior", behavior}}; }

json with(json j, const json& extra) {
    j.update(extra);
    return j;
}

json plan(json directives, std::initializer_list<json> more) {
    for (const auto& d : more) directives.push_back(d);
    return directives;
}

std::vector<CatalogEntry> build() {
    std::vector<CatalogEntry> out;
    auto add = [&](const char* name, const char* summary, json cfg) {
        cfg["name"] = name;
        out.push_back({name, summary, std::move(cfg)});
    };

    add("good-case", "PBFT-light, every correct process starts after GST, leader(1) correct",
        with(base("pbft-light"),
             {{"faulty", {4}},
              {"gst", 50},
              {"start_window", {51, 80}},
              {"t_broadcast", 8},
              {"init_dur_delivery", 16},
              {"init_dur_recovery", 24},
              {"latency_mode", true},
              {"horizon", 800},
              {"liveness_cutoff", 600},
              {"workload", {{"per_process", 5}, {"window", {60, 600}}}},
              {"fault_plan", json::array({byz(4, "crash")})},
              {"require_premises", {"latency.good_case", "abcast.liveness"}}}));

    add("pre-gst-chaos", "PBFT-light starting before GST under loss, delay and drift",
        with(base("pbft-light"),
             {{"faulty", {4}},
              {"gst", 300},
              {"start_window", {0, 100}},
              {"init_dur_delivery", 16},
              {"init_dur_recovery", 24},
              {"latency_mode", true},
              {"horizon", 700},
              {"liveness_cutoff", 550},
              {"workload", {{"per_process", 4}, {"window", {0, 290}}}},
              {"fault_plan", plan(chaos(0.3), {byz(4, "random-wish")})},
              {"require_premises", {"abcast.liveness"}}}));

    add("equivocating-leader", "PBFT-light whose first leader sends conflicting proposals and votes",
        with(base("pbft-light"),
             {{"faulty", {1}},
              {"gst", 150},
              {"start_window", {0, 60}},
              {"init_dur_delivery", 16},
              {"init_dur_recovery", 24},
              {"latency_mode", true},
              {"horizon", 1200},
              {"liveness_cutoff", 900},
              {"workload", {{"per_process", 5}, {"window", {0, 800}}}},
              {"fault_plan", plan(chaos(0.2), {byz(1, "equivocate")})},
              {"require_premises", {"cert.prepared_agreement", "abcast.liveness"}}}));

    add("stale-cert", "PBFT-light with a process reporting old certificates and replaying votes",
        with(base("pbft-light"),
             {{"faulty", {2}},
              {"gst", 150},
              {"start_window", {0, 60}},
              {"init_dur_delivery", 16},
              {"init_dur_recovery", 24},
              {"latency_mode", true},
              {"horizon", 1200},
              {"liveness_cutoff", 900},
              {"workload", {{"per_process", 5}, {"window", {0, 800}}}},
              {"fault_plan", plan(chaos(0.2), {byz(2, "stale-cert"), byz(2, "vote-spam")})},
              {"require_premises", {"cert.prepared_agreement", "abcast.liveness"}}}));

    add("withhold", "PBFT-light under a silent leader, full trace for timer completeness",
        with(base("pbft-light"),
             {{"faulty", {1}},
              {"gst", 20},
              {"start_window", {0, 10}},
              {"init_dur_delivery", 16},
              {"init_dur_recovery", 24},
              {"latency_mode", true},
              {"trace_level", "full"},
              {"horizon", 800},
              {"liveness_cutoff", 600},
              {"workload", {{"per_process", 4}, {"window", {0, 500}}}},
              {"fault_plan", plan(chaos(0.2), {byz(1, "withhold")})},
              {"require_premises", {"liveness.completeness", "harness.post_gst_delivery"}}}));

    add("crashed-leader", "PBFT-rotation started after GST with the leader of view 3 crashed from the start",
        with(base("pbft-rotation"),
             {{"faulty", {3}},
              {"gst", 20},
              {"start_window", {21, 30}},
              {"batch", 4},
              {"t_broadcast", 8},
              {"init_dur_delivery", 16},
              {"init_dur_recovery", 24},
              {"horizon", 600},
              {"liveness_cutoff", 400},
              {"target_view", 8},
              {"workload", {{"per_process", 6}, {"window", {21, 400}}}},
              {"fault_plan", json::array({byz(3, "crash")})},
              {"require_premises", {"latency.crashed_leader", "abcast.liveness"}}}));

    add("rotation-recovery", "PBFT-rotation started before GST, capped timeouts",
        with(base("pbft-rotation"),
             {{"faulty", {4}},
              {"gst", 200},
              {"start_window", {0, 80}},
              {"batch", 4},
              {"t_broadcast", 8},
              {"init_dur_delivery", 20},
              {"init_dur_recovery", 16},
              {"latency_mode", true},
              {"horizon", 700},
              {"liveness_cutoff", 500},
              {"workload", {{"per_process", 5}, {"window", {0, 450}}}},
              {"fault_plan", plan(chaos(0.3), {byz(4, "equivocate")})},
              {"require_premises", {"latency.rotation_recovery"}}}));

    add("censorship", "PBFT-rotation with a leader that never proposes values from p2",
        with(base("pbft-rotation"),
             {{"faulty", {1}},
              {"gst", 100},
              {"start_window", {0, 40}},
              {"batch", 4},
              {"t_broadcast", 8},
              {"init_dur_delivery", 20},
              {"init_dur_recovery", 24},
              {"latency_mode", true},
              {"horizon", 1200},
              {"liveness_cutoff", 800},
              {"target_view", 20},
              {"workload", {{"per_process", 6}, {"window", {0, 700}}}},
              {"fault_plan",
               plan(chaos(0.2), {{{"kind", "byzantine"}, {"pid", 1}, {"behavior", "censor"}, {"target", 2}}})},
              {"require_premises", {"abcast.liveness", "liveness.perpetual_rotation"}}}));

    add("hotstuff", "HotStuff-light with an equivocating process",
        with(base("hotstuff-light"),
             {{"faulty", {1}},
              {"gst", 150},
              {"start_window", {0, 60}},
              {"batch", 4},
              {"t_broadcast", 8},
              {"init_dur_delivery", 24},
              {"init_dur_recovery", 24},
              {"latency_mode", true},
              {"horizon", 700},
              {"liveness_cutoff", 450},
              {"target_view", 12},
              {"workload", {{"per_process", 5}, {"window", {0, 400}}}},
              {"fault_plan", plan(chaos(0.2), {byz(1, "equivocate")})},
              {"require_premises", {"cert.committed_agreement", "abcast.liveness"}}}));

    add("hotstuff-stale", "HotStuff-light with stale certificates and far-future votes",
        with(base("hotstuff-light"),
             {{"faulty", {2}},
              {"gst", 150},
              {"start_window", {0, 60}},
              {"batch", 4},
              {"t_broadcast", 8},
              {"init_dur_delivery", 24},
              {"init_dur_recovery", 24},
              {"latency_mode", true},
              {"horizon", 700},
              {"liveness_cutoff", 450},
              {"target_view", 12},
              {"workload", {{"per_process", 5}, {"window", {0, 400}}}},
              {"fault_plan", plan(chaos(0.2), {byz(2, "stale-cert"), byz(2, "vote-spam")})},
              {"require_premises", {"cert.committed_agreement", "abcast.liveness"}}}));

    add("sync-chaos", "Synchronizer with a process sending arbitrary WISHes, pre-GST loss, delay and drift",
        with(base("toy-client"),
             {{"faulty", {4}},
              {"gst", 200},
              {"start_window", {0, 100}},
              {"horizon", 700},
              {"checks", {"harness", "sync"}},
              {"fault_plan", plan(chaos(0.3), {byz(4, "random-wish")})},
              {"require_premises", {"sync.bounded_entry", "sync.latency_b"}}}));

    // horizon = GST + 200 * (tau + 2 delta)
    add("toy-client", "Synchronizer driven by the toy client up to view 100",
        with(base("toy-client"),
             {{"faulty", {4}},
              {"gst", 200},
              {"start_window", {0, 100}},
              {"horizon", 200 + 200 * (4 + 2 * 2)},
              {"target_view", 100},
              {"trace_level", "minimal"},
              {"fault_plan", plan(chaos(0.3), {byz(4, "random-wish")})},
              {"require_premises", {"toy.progress"}}}));

    add("consensus-sync", "Consensus synchronizer with F(v) = v * Delta",
        with(base("consensus-sync"),
             {{"faulty", {4}},
              {"gst", 100},
              {"start_window", {0, 50}},
              {"view_duration_unit", 4},
              {"horizon", 1500},
              {"fault_plan", plan(chaos(0.3), {byz(4, "random-wish")})},
              {"require_premises", {"csync"}}}));

    add("bounded-space", "1000 views of the toy client under high-view WISH spam and far-future votes",
        with(base("toy-client"),
             {{"faulty", {4}},
              {"gst", 50},
              {"start_window", {0, 20}},
              {"horizon", 9000},
              {"target_view", 1000},
              {"trace_level", "minimal"},
              {"mem_sample_every", 1},
              {"checks", {"harness.event_order", "sync.monotonicity", "sync.bounded_space", "toy"}},
              {"fault_plan", plan(chaos(0.1), {byz(4, "wish-spam"), byz(4, "vote-spam")})},
              {"require_premises", {"sync.bounded_space", "toy.progress"}}}));

    add("bounded-space-replica", "About 1000 views of PBFT-rotation under high-view WISH spam and far-future votes",
        with(base("pbft-rotation"),
             {{"faulty", {4}},
              {"gst", 50},
              {"start_window", {0, 20}},
              {"batch", 1},
              {"t_broadcast", 2},
              {"init_dur_delivery", 12},
              {"init_dur_recovery", 12},
              {"latency_mode", true},
              {"horizon", 9000},
              {"trace_level", "minimal"},
              {"mem_sample_every", 1},
              {"checks", {"harness.event_order", "sync.monotonicity", "sync.bounded_space", "abcast.ordering"}},
              {"fault_plan", plan(chaos(0.1), {byz(4, "wish-spam"), byz(4, "vote-spam")})},
              {"require_premises", {"sync.bounded_space"}}}));
    return out;
}

}  // namespace

ScenarioConfig CatalogEntry::make(std::uint64_t seed) const {
    json j = config;
    j["seed"] = seed;
    return config_from_json(j);
}

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = build();
    return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
    for (const auto& e : catalog())
        if (e.name == name) return e;
    throw std::invalid_argument("no catalog entry named '" + name + "'");
}

}  // namespace smr
