// smrsim: run, check and sweep replication scenarios.
#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "smr/catalog.hpp"
#include "smr/check/checker.hpp"
#include "smr/sim/simulator.hpp"
#include "smr/sweep.hpp"

namespace {

using namespace smr;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Source {
    std::string config;
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string protocol;
    std::optional<Tick> horizon;

    void attach(CLI::App* app) {
        auto* c = app->add_option("--config", config, "scenario config (JSON)");
        auto* s = app->add_option("--scenario", scenario, "catalog entry name");
        c->excludes(s);
        app->add_option("--seed", seed, "override the seed");
        app->add_option("--protocol", protocol, "override the protocol");
        app->add_option("--horizon", horizon, "override the horizon (ticks)");
    }

    ScenarioConfig load() const {
        ScenarioConfig cfg;
        if (!config.empty()) cfg = load_config(config);
        else if (!scenario.empty()) cfg = catalog_entry(scenario).make(0);
        else throw ConfigError("one of --config or --scenario is required");
        apply(cfg);
        return cfg;
    }

    void apply(ScenarioConfig& cfg) const {
        if (seed) cfg.seed = *seed;
        if (!protocol.empty()) cfg.protocol = protocol_from_string(protocol);
        if (horizon) cfg.horizon = *horizon;
        validate(cfg);
    }
};

std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& s) {
    auto num = [&](std::string_view part) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc{} || p != part.data() + part.size()) throw ConfigError("bad seed range '" + s + "'");
        return v;
    };
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        auto v = num(s);
        return {v, v};
    }
    auto lo = num(std::string_view(s).substr(0, dots));
    auto hi = num(std::string_view(s).substr(dots + 2));
    if (hi < lo) throw ConfigError("empty seed range '" + s + "'");
    return {lo, hi};
}

int report(const Trace& trace, const CheckOptions& opts, bool strict, const std::string& json_out, bool quiet) {
    const auto rep = check_trace(trace, opts);
    if (!quiet) std::cout << rep.table();
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        out << rep.to_json(trace).dump(2) << '\n';
    }
    return rep.ok(strict) ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulate and check view-synchronized replication protocols"};
    app.require_subcommand(1);

    Source run_src;
    std::string run_out, run_report;
    bool run_check = false, run_strict = false;
    auto* run = app.add_subcommand("run", "simulate one scenario and write its trace");
    run_src.attach(run);
    run->add_option("--out", run_out, "trace output (JSONL)");
    run->add_flag("--check", run_check, "check the trace after running");
    run->add_option("--report", run_report, "write the check report as JSON");
    run->add_flag("--strict-premises", run_strict, "treat not-applicable checks as failures");

    std::string chk_trace, chk_config, chk_report;
    std::vector<std::string> chk_only;
    bool chk_strict = false, chk_quiet = false;
    auto* check = app.add_subcommand("check", "check a recorded trace");
    check->add_option("--trace", chk_trace, "trace (JSONL)")->required();
    check->add_option("--config", chk_config, "config to use instead of the trace header");
    check->add_option("--checks", chk_only, "property ids or groups to check");
    check->add_option("--report", chk_report, "write the report as JSON");
    check->add_flag("--strict-premises", chk_strict, "treat not-applicable checks as failures");
    check->add_flag("--quiet", chk_quiet, "no table on stdout");

    Source sw_src;
    std::string sw_seeds = "0..99", sw_csv;
    unsigned sw_threads = 0;
    bool sw_strict = false;
    auto* sw = app.add_subcommand("sweep", "run and check a seed range");
    sw_src.attach(sw);
    sw->add_option("--seeds", sw_seeds, "seed range a..b (inclusive)");
    sw->add_option("--csv", sw_csv, "per-seed CSV output");
    sw->add_option("--threads", sw_threads, "worker threads (0: all cores)");
    sw->add_flag("--strict-premises", sw_strict, "treat not-applicable checks as failures");

    std::string cat_dir;
    auto* cat = app.add_subcommand("catalog", "list the scenario catalog");
    cat->add_option("--write", cat_dir, "write each entry's config into this directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto cfg = run_src.load();
            const Trace tr = run_scenario(cfg);
            if (!run_out.empty()) {
                std::ofstream out(run_out);
                if (!out) throw ConfigError("cannot write " + run_out);
                write_jsonl(out, tr);
            }
            std::cerr << tr.events.size() << " events\n";
            if (run_check || !run_report.empty()) return report(tr, {}, run_strict, run_report, false);
            return 0;
        }
        if (check->parsed()) {
            std::optional<ScenarioConfig> fallback;
            if (!chk_config.empty()) fallback = load_config(chk_config);
            const Trace tr = load_trace(chk_trace, fallback ? &*fallback : nullptr);
            return report(tr, CheckOptions{chk_only}, chk_strict, chk_report, chk_quiet);
        }
        if (sw->parsed()) {
            const auto cfg = sw_src.load();
            const auto [lo, hi] = parse_range(sw_seeds);
            const auto rows = sweep(cfg, lo, hi, sw_strict, sw_threads);
            std::size_t bad = 0;
            for (const auto& r : rows) bad += r.ok ? 0 : 1;
            if (!sw_csv.empty()) {
                std::ofstream out(sw_csv);
                if (!out) throw ConfigError("cannot write " + sw_csv);
                write_csv(out, rows);
            } else {
                write_csv(std::cout, rows);
            }
            std::cerr << rows.size() - bad << "/" << rows.size() << " seeds ok\n";
            return bad ? kExitFail : 0;
        }
        if (cat->parsed()) {
            for (const auto& e : catalog()) {
                std::cout << e.name << "  " << e.summary << '\n';
                if (!cat_dir.empty()) {
                    std::filesystem::create_directories(cat_dir);
                    std::ofstream out(std::filesystem::path(cat_dir) / (e.name + ".json"));
                    out << e.config.dump(2) << '\n';
                }
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const TraceParseError& e) {
        std::cerr << "trace error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
