// gtdp: command-line front end for the group-testing design optimizer.
//
//   gtdp value    --proc r1|r3 --q Q --n N
//   gtdp table    --proc r1|r3 --q Q --from A --to B
//   gtdp simulate --proc r1|r3 --q Q --n N --trials T --seed S
//   gtdp bounds   --q Q --n N
//   gtdp verify   [--q Q]
//   gtdp session  --proc r1|r3 --q Q --n N [--script FILE]
//
// Exit codes: 0 success, 1 a verify claim failed, 2 invalid input,
// 3 resource, capacity or table-store failure.

#include "gtdp/baselines.hpp"
#include "gtdp/engine_r1.hpp"
#include "gtdp/engine_r3.hpp"
#include "gtdp/errors.hpp"
#include "gtdp/reproduction.hpp"
#include "gtdp/session.hpp"
#include "gtdp/simulator.hpp"
#include "gtdp/store.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

namespace {

using namespace gtdp;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

struct RunConfig {
    std::string procedure = "r3";
    double q = 0.9999;
    Count n = 0;
    bool cap_to_nmax = false;
    bool windowed_search = false;
    Count trials = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string format;
    std::string cache_dir;
    bool no_cache = false;
    std::size_t budget_mib = 2048;

    Procedure proc() const { return parse_procedure(procedure); }
    R1Options r1_options() const
    {
        R1Options o;
        o.windowed_search = windowed_search;
        o.memory_budget_bytes = budget_mib << 20;
        return o;
    }
    std::filesystem::path cache() const
    {
        return cache_dir.empty() ? default_cache_dir() : std::filesystem::path(cache_dir);
    }
};

struct Provenance {
    bool from_cache = false;
    std::string path;
    double elapsed_ms = 0.0;
};

double ms_since(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void try_save(const auto& table, const std::filesystem::path& path)
{
    try {
        save_table(table, path);
    } catch (const StoreError& e) {
        std::cerr << "warning: table not cached: " << e.what() << '\n';
    }
}

R3Table acquire_r3(const RunConfig& cfg, Count n, Provenance& prov)
{
    const auto start = Clock::now();
    if (!cfg.no_cache) {
        if (auto path = find_cached(cfg.cache(), Procedure::R3, cfg.q, n, cfg.cap_to_nmax)) {
            try {
                R3Table t = load_r3(*path, cfg.q);
                prov = {true, path->string(), ms_since(start)};
                return t;
            } catch (const StoreError& e) {
                std::cerr << "warning: ignoring cached table: " << e.what() << '\n';
            }
        }
    }
    R3Table t = build_r3(Prevalence(cfg.q), n, cfg.cap_to_nmax);
    prov = {false, {}, ms_since(start)};
    if (!cfg.no_cache) {
        try_save(t, cfg.cache() / cache_file_name(Procedure::R3, cfg.q, n, cfg.cap_to_nmax));
    }
    return t;
}

R1Table acquire_r1(const RunConfig& cfg, Count n, Provenance& prov)
{
    const auto start = Clock::now();
    if (!cfg.no_cache) {
        if (auto path = find_cached(cfg.cache(), Procedure::R1, cfg.q, n)) {
            try {
                R1Table t = load_r1(*path, cfg.q);
                prov = {true, path->string(), ms_since(start)};
                return t;
            } catch (const StoreError& e) {
                std::cerr << "warning: ignoring cached table: " << e.what() << '\n';
            }
        }
    }
    R1Table t = build_r1(Prevalence(cfg.q), n, cfg.r1_options());
    prov = {false, {}, ms_since(start)};
    // Windowed builds are not cached: the cache must only ever serve full scans.
    if (!cfg.no_cache && !cfg.windowed_search) {
        try_save(t, cfg.cache() / cache_file_name(Procedure::R1, cfg.q, n));
    }
    return t;
}

using AnyOwned = std::variant<R1Table, R3Table>;

AnyOwned acquire(const RunConfig& cfg, Count n, Provenance& prov)
{
    if (cfg.proc() == Procedure::R1) return acquire_r1(cfg, n, prov);
    return acquire_r3(cfg, n, prov);
}

Policy policy_of(const AnyOwned& table)
{
    return std::visit([](const auto& t) { return Policy(t); }, table);
}

Count first_test(const Policy& policy, Count n)
{
    return n == 0 ? 0 : policy.binomial_choice(n);
}

std::string fixed5(double v)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(5) << v;
    return s.str();
}

void check_format(const std::string& format, std::initializer_list<const char*> allowed)
{
    for (const char* a : allowed) {
        if (format == a) return;
    }
    throw DomainError("unsupported output format '" + format + "'");
}

// ------------------------------------------------------------------ commands

int cmd_value(const RunConfig& cfg)
{
    check_format(cfg.format, {"human", "json"});
    Provenance prov;
    const AnyOwned table = acquire(cfg, cfg.n, prov);
    const Policy policy = policy_of(table);
    const double expected = policy.expected_tests(cfg.n);
    const Count first = first_test(policy, cfg.n);
    const double bound = info_bound(Prevalence(cfg.q), cfg.n);

    if (cfg.format == "json") {
        json j = {{"procedure", std::string(to_string(cfg.proc()))},
                  {"q", cfg.q},
                  {"n", cfg.n},
                  {"expected_tests", expected},
                  {"first_test", first},
                  {"info_bound", bound},
                  {"from_cache", prov.from_cache},
                  {"elapsed_ms", prov.elapsed_ms}};
        std::cout << std::setprecision(17) << j.dump(2) << '\n';
        return 0;
    }
    std::cout << "procedure       " << to_string(cfg.proc()) << '\n'
              << "q               " << std::setprecision(10) << cfg.q << '\n'
              << "n               " << cfg.n << '\n'
              << "expected tests  " << fixed5(expected) << '\n'
              << "first test      " << first << '\n'
              << "info bound      " << fixed5(bound) << '\n'
              << "table           "
              << (prov.from_cache ? "loaded from " + prov.path : std::string("built")) << " in "
              << std::setprecision(4) << prov.elapsed_ms << " ms\n";
    return 0;
}

int cmd_table(const RunConfig& cfg, Count from, Count to)
{
    check_format(cfg.format, {"csv", "json", "human"});
    json rows = json::array();
    if (from > to) {
        if (cfg.format == "csv") std::cout << "n,expected_tests,first_test\n";
        if (cfg.format == "json") std::cout << rows.dump() << '\n';
        return 0;
    }
    Provenance prov;
    const AnyOwned table = acquire(cfg, to, prov);
    const Policy policy = policy_of(table);

    if (cfg.format == "csv") std::cout << "n,expected_tests,first_test\n";
    for (Count n = from; n <= to; ++n) {
        const double v = policy.expected_tests(n);
        const Count first = first_test(policy, n);
        if (cfg.format == "csv") {
            std::cout << n << ',' << std::setprecision(17) << v << ',' << first << '\n';
        } else if (cfg.format == "human") {
            std::cout << std::setw(8) << n << "  " << std::setw(14) << fixed5(v) << "  "
                      << std::setw(8) << first << '\n';
        } else {
            rows.push_back({{"n", n}, {"expected_tests", v}, {"first_test", first}});
        }
    }
    if (cfg.format == "json") std::cout << std::setprecision(17) << rows.dump(2) << '\n';
    return 0;
}

int cmd_simulate(const RunConfig& cfg)
{
    check_format(cfg.format, {"human", "json"});
    Provenance prov;
    const AnyOwned table = acquire(cfg, cfg.n, prov);
    const Policy policy = policy_of(table);
    const auto start = Clock::now();
    const SimEstimate est = simulate(policy, cfg.n, cfg.trials, cfg.seed, cfg.threads);
    const double elapsed = ms_since(start);
    const double expected = policy.expected_tests(cfg.n);
    const double z = est.std_error > 0 ? (est.mean - expected) / est.std_error : 0.0;

    if (cfg.format == "json") {
        json j = {{"procedure", std::string(to_string(cfg.proc()))},
                  {"q", cfg.q},
                  {"n", cfg.n},
                  {"trials", est.trials},
                  {"seed", est.seed},
                  {"mean", est.mean},
                  {"stderr", est.std_error},
                  {"expected_tests", expected},
                  {"z", z},
                  {"misclassified", est.misclassified},
                  {"elapsed_ms", elapsed}};
        std::cout << std::setprecision(17) << j.dump(2) << '\n';
    } else {
        std::cout << "procedure       " << to_string(cfg.proc()) << '\n'
                  << "n               " << cfg.n << '\n'
                  << "trials          " << est.trials << " (seed " << est.seed << ")\n"
                  << "mean tests      " << fixed5(est.mean) << " +/- " << fixed5(est.std_error)
                  << '\n'
                  << "dp expectation  " << fixed5(expected) << "  (z = " << std::setprecision(3)
                  << z << ")\n"
                  << "misclassified   " << est.misclassified << '\n';
    }
    return est.misclassified == 0 ? 0 : 1;
}

int cmd_bounds(const RunConfig& cfg)
{
    check_format(cfg.format, {"human", "json"});
    const Prevalence p(cfg.q);
    const BoundReport r = bound_report(p, cfg.n);
    const Count nm = n_max(p);
    if (cfg.format == "json") {
        json j = {{"q", r.q},
                  {"n", r.n},
                  {"n_max", nm},
                  {"individual", r.individual},
                  {"dorfman_best", r.dorfman_best},
                  {"dorfman_best_k", r.dorfman_best_k},
                  {"info_bound", r.info_bound}};
        std::cout << std::setprecision(17) << j.dump(2) << '\n';
        return 0;
    }
    std::cout << "q               " << std::setprecision(10) << r.q << '\n'
              << "n               " << r.n << '\n'
              << "n_max           " << nm << '\n'
              << "individual      " << fixed5(r.individual) << '\n'
              << "dorfman best    " << fixed5(r.dorfman_best) << " (k = " << r.dorfman_best_k
              << ")\n"
              << "info bound      " << fixed5(r.info_bound) << '\n';
    return 0;
}

int cmd_verify(const RunConfig& cfg)
{
    check_format(cfg.format, {"human", "json"});
    TableSource source{
        [&cfg](Prevalence, Count n) {
            Provenance prov;
            return acquire_r3(cfg, n, prov);
        },
        [&cfg](Prevalence, Count n) {
            Provenance prov;
            return acquire_r1(cfg, n, prov);
        },
    };
    const auto claims = run_reproduction(cfg.q, source);
    bool all = true;
    for (const auto& c : claims) all = all && c.passed;

    if (cfg.format == "json") {
        json list = json::array();
        for (const auto& c : claims) {
            list.push_back({{"id", c.id},
                            {"description", c.description},
                            {"computed", c.computed},
                            {"expected", c.expected},
                            {"delta", c.computed - c.expected},
                            {"tolerance", c.tolerance},
                            {"observational", c.observational},
                            {"passed", c.passed},
                            {"elapsed_ms", c.elapsed_ms}});
        }
        json j = {{"q", cfg.q}, {"passed", all}, {"claims", list}};
        std::cout << std::setprecision(17) << j.dump(2) << '\n';
    } else {
        for (const auto& c : claims) {
            std::cout << (c.observational ? "NOTE" : c.passed ? "PASS" : "FAIL") << "  "
                      << std::left << std::setw(22) << c.id << std::right;
            if (c.observational) {
                std::cout << " observed " << c.computed;
            } else {
                std::cout << " computed " << std::setprecision(10) << c.computed << "  published "
                          << c.expected << "  delta " << std::setprecision(3)
                          << c.computed - c.expected << "  tol " << c.tolerance;
            }
            std::cout << "  [" << std::fixed << std::setprecision(1) << c.elapsed_ms << " ms]"
                      << std::defaultfloat << "  " << c.description << '\n';
        }
        std::cout << (all ? "all claims reproduced\n" : "some claims FAILED\n");
    }
    return all ? 0 : 1;
}

int cmd_session(const RunConfig& cfg, const std::string& script)
{
    Provenance prov;
    const AnyOwned table = acquire(cfg, cfg.n, prov);
    const Policy policy = policy_of(table);
    if (!script.empty()) {
        std::ifstream in(script);
        if (!in) throw DomainError("cannot open script '" + script + "'");
        run_session(policy, cfg.n, in, std::cout, true);
    } else {
        run_session(policy, cfg.n, std::cin, std::cout);
    }
    return 0;
}

void add_common(CLI::App* cmd, RunConfig& cfg, bool needs_proc, bool needs_n)
{
    if (needs_proc) {
        cmd->add_option("--proc", cfg.procedure, "Procedure: r1 (optimal nested) or r3 (restricted)")
            ->check(CLI::IsMember({"r1", "r3", "R1", "R3"}));
    }
    cmd->add_option("--q", cfg.q, "Probability that a unit is good, 0 < q < 1");
    if (needs_n) cmd->add_option("--n", cfg.n, "Population size")->required();
    cmd->add_option("--format", cfg.format, "Output format: human or json (table: csv, json, human)");
    cmd->add_option("--cache-dir", cfg.cache_dir,
                    "Table cache directory (default $GTDP_CACHE_DIR, then ~/.cache/gtdp)");
    cmd->add_flag("--no-cache", cfg.no_cache, "Neither read nor write cached tables");
    cmd->add_flag("--cap-nmax", cfg.cap_to_nmax, "R3: never consider first groups above n_max");
    cmd->add_flag("--windowed", cfg.windowed_search, "R1: windowed argmin search");
    cmd->add_option("--memory-budget-mib", cfg.budget_mib, "R1 build memory budget");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Expected-test optimizer for nested group-testing procedures"};
    app.require_subcommand(1);

    RunConfig cfg;
    Count from = 1;
    Count to = 0;
    std::string script;

    auto* value = app.add_subcommand("value", "Expected tests and first group for one population");
    add_common(value, cfg, true, true);

    auto* table = app.add_subcommand("table", "Rows n, expected_tests, first_test over a range");
    add_common(table, cfg, true, false);
    table->add_option("--from", from, "First population size")->default_val(1);
    table->add_option("--to", to, "Last population size")->required();

    auto* sim = app.add_subcommand("simulate", "Monte Carlo run of the policy");
    add_common(sim, cfg, true, true);
    sim->add_option("--trials", cfg.trials, "Number of simulated populations");
    sim->add_option("--seed", cfg.seed, "Seed of the keyed random streams");
    sim->add_option("--threads", cfg.threads, "Worker threads (results do not depend on this)");

    auto* bounds = app.add_subcommand("bounds", "Closed-form baselines: n_max, Dorfman, entropy");
    add_common(bounds, cfg, false, true);

    auto* verify = app.add_subcommand("verify", "Recompute every published value and compare");
    add_common(verify, cfg, false, false);

    auto* session = app.add_subcommand("session", "Interactive pooling session (+ / - / state / quit)");
    add_common(session, cfg, true, true);
    session->add_option("--script", script, "Read answers from this file instead of stdin");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (cfg.format.empty()) cfg.format = table->parsed() ? "csv" : "human";

    try {
        if (value->parsed()) return cmd_value(cfg);
        if (table->parsed()) return cmd_table(cfg, from, to);
        if (sim->parsed()) return cmd_simulate(cfg);
        if (bounds->parsed()) return cmd_bounds(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (session->parsed()) return cmd_session(cfg, script);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const RangeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const StoreError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::bad_alloc&) {
        std::cerr << "error: out of memory\n";
        return 3;
    }
    return 2;
}
