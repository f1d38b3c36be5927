// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   gtdp_acceptance [--cache-dir DIR]
//
// With --cache-dir the reference tables are also written there, so a later
// `gtdp verify --cache-dir DIR` can reuse them.

#include "gtdp/baselines.hpp"
#include "gtdp/engine_r1.hpp"
#include "gtdp/engine_r3.hpp"
#include "gtdp/errors.hpp"
#include "gtdp/oracle.hpp"
#include "gtdp/session.hpp"
#include "gtdp/simulator.hpp"
#include "gtdp/store.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

using namespace gtdp;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kQ = 0.9999;
constexpr double kMiB = 1024.0 * 1024.0;

double seconds_since(Clock::time_point t)
{
    return std::chrono::duration<double>(Clock::now() - t).count();
}

// Peak resident set size in bytes, from /proc; 0 if unavailable.
double peak_rss()
{
    std::ifstream in("/proc/self/status");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("VmHWM:", 0) == 0) return std::stod(line.substr(6)) * 1024.0;
    }
    return 0.0;
}

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail)
{
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << "  " << id << ". " << name << ": " << detail
              << std::endl;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

template <class T>
bool same_bits(std::span<const T> a, std::span<const T> b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size_bytes()) == 0;
}

} // namespace

int main(int argc, char** argv)
{
    fs::path cache_dir;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::strcmp(argv[i], "--cache-dir") == 0) cache_dir = argv[i + 1];
    }
    const fs::path work = cache_dir.empty() ? fs::temp_directory_path() / "gtdp_acceptance"
                                            : cache_dir;
    fs::create_directories(work);
    const auto p = make_prevalence(kQ);

    // 1
    {
        const auto t0 = Clock::now();
        const auto t = build_r3(p, 6765);
        const double secs = seconds_since(t0);
        const double e = t.expected(6765);
        const double mb = double(t.footprint_bytes()) / 1e6;
        const double rss = peak_rss() / 1e6;
        report(1, "R3 reproduction",
               near(e, 12.94809, 1e-5) && secs < 5.0 && mb < 50.0 && rss < 50.0,
               fmt("E(6765)=%.8f (want 12.94809 +-1e-5), %.3f s, table %.1f MB, peak RSS %.1f MB",
                   e, secs, mb, rss));
    }

    // 3, 4, 5 share the restricted reference table
    const auto r3 = build_r3(p, 10779);
    std::optional<R1Table> r1;

    // 2
    {
        const auto t0 = Clock::now();
        r1.emplace(build_r1(p, 6765));
        const double secs = seconds_since(t0);
        const double h = r1->binomial(6765);
        const double gib = double(r1_build_footprint(6765)) / (1024.0 * kMiB);
        const double rss = peak_rss() / (1024.0 * kMiB);

        R1Options windowed;
        windowed.windowed_search = true;
        double worst = 0.0;
        for (double q : {0.5, 0.9, 0.99, 0.999, 0.9999}) {
            const auto full = build_r1(make_prevalence(q), 400);
            const auto win = build_r1(make_prevalence(q), 400, windowed);
            for (Count n = 0; n <= 400; ++n) {
                worst = std::max(worst, std::abs(full.binomial(n) - win.binomial(n)));
            }
        }
        const auto tw = Clock::now();
        const double hw = build_r1(p, 6765, windowed).binomial(6765);
        const double wsecs = seconds_since(tw);
        const bool ok = near(h, 10.14778, 1e-5) && secs <= 900.0 && gib <= 1.5 && rss <= 1.5 &&
                        worst <= 1e-9 && std::abs(hw - h) <= 1e-9;
        report(2, "R1 reproduction", ok,
               fmt("H(6765)=%.8f (want 10.14778 +-1e-5), full scan %.1f s, build footprint %.3f "
                   "GiB, peak RSS %.3f GiB",
                   h, secs, gib, rss) +
                   fmt("; windowed: max |diff| n<=400 %.2e, H(6765)=%.10f in %.1f s", worst, hw,
                       wsecs));
    }

    // 3
    {
        const Count parts[] = {6765, 3235};
        const double e10 = r3.expected(10000), e32 = r3.expected(3235);
        const double pen = split_cost_r3(r3, parts) - e10;
        report(3, "correction instance",
               near(e10, 19.20284, 1e-5) && near(e32, 6.34621, 1e-5) && near(pen, 0.09146, 2e-4),
               fmt("E(10000)=%.8f, E(3235)=%.8f, split penalty %.7f (want 0.09146 +-2e-4)", e10,
                   e32, pen));
    }

    // 4
    {
        bool ok = true;
        std::string detail;
        for (Count n : {6765, 7000, 8000, 9000, 10000, 10500, 10778}) {
            const Count c = r3.choice_binomial(n);
            ok = ok && c == n;
            detail += std::to_string(n) + "->" + std::to_string(c) + " ";
        }
        const Count flip = r3.choice_binomial(10779);
        ok = ok && flip >= 1 && flip <= 10779;
        report(4, "first-test claim", ok, detail + "(observed 10779->" + std::to_string(flip) + ")");
    }

    // 5
    {
        const Count a = n_max(p), b = n_max(make_prevalence(0.5));
        report(5, "n_max", a == 92099 && b == 1,
               "n_max(0.9999)=" + std::to_string(a) + ", n_max(0.5)=" + std::to_string(b));
    }

    // 6
    {
        const auto t0 = Clock::now();
        double worst = 0.0, labeled_gap = 0.0;
        for (double q : {0.5, 0.9, 0.99}) {
            const auto pq = make_prevalence(q);
            const auto h = build_r1(pq, 6);
            const auto e = build_r3(pq, 6);
            for (Count n = 1; n <= 6; ++n) {
                worst = std::max(worst, std::abs(exhaustive_min_r1(pq, n).value - h.binomial(n)));
                worst = std::max(worst, std::abs(exhaustive_min_r3(pq, n).value - e.expected(n)));
            }
            for (Count n = 1; n <= 4; ++n) {
                labeled_gap = std::max(labeled_gap, h.binomial(n) - labeled_min_nested(pq, n));
            }
        }
        const double secs = seconds_since(t0);
        report(6, "oracle equivalence", worst <= 1e-12 && labeled_gap <= 1e-12 && secs < 60.0,
               fmt("max |oracle - DP| %.2e, best labeled improvement %.2e, %.2f s", worst,
                   labeled_gap, secs));
    }

    // 7
    {
        bool ok = true;
        Count checked = 0;
        for (double q : {0.5, 0.9, 0.99, 0.999}) {
            const auto pq = make_prevalence(q);
            const auto h = build_r1(pq, 200);
            const auto e = build_r3(pq, 200);
            for (Count n = 0; n <= 200; ++n, ++checked) {
                ok = ok && n * binary_entropy(1.0 - q) <= h.binomial(n) &&
                     h.binomial(n) <= e.expected(n) && e.expected(n) <= double(n);
            }
        }
        const double ib = info_bound(p, 6765);
        ok = ok && r1->binomial(6765) >= ib;
        report(7, "dominance and bounds", ok,
               std::to_string(checked) + " grid points; info bound(6765)=" + fmt("%.5f", ib) +
                   " <= H(6765)=" + fmt("%.5f", r1->binomial(6765)));
    }

    // 8
    {
        const auto t0 = Clock::now();
        const auto r3s = build_r3(p, 6765);
        const auto r1s = build_r1(make_prevalence(0.9), 50);
        const auto a = simulate(Policy(r3s), 6765, 200000, 1);
        const auto b = simulate(Policy(r1s), 50, 500000, 2);
        const double secs = seconds_since(t0);
        const auto a4 = simulate(Policy(r3s), 6765, 200000, 1, 4);
        const auto b4 = simulate(Policy(r1s), 50, 500000, 2, 4);
        const bool same = a.mean == a4.mean && a.std_error == a4.std_error && b.mean == b4.mean &&
                          b.std_error == b4.std_error && a.misclassified == a4.misclassified;
        const double za = (a.mean - 12.94809) / a.std_error;
        const double zb = (b.mean - r1s.binomial(50)) / b.std_error;
        const bool ok = std::abs(za) <= 4.0 && std::abs(zb) <= 4.0 && a.misclassified == 0 &&
                        b.misclassified == 0 && same && secs < 120.0;
        report(8, "Monte Carlo consistency", ok,
               fmt("R3 mean %.5f +- %.5f (z=%.2f); ", a.mean, a.std_error, za) +
                   fmt("R1 mean %.5f +- %.5f vs H(50)=%.5f (z=%.2f); ", b.mean, b.std_error,
                       r1s.binomial(50), zb) +
                   "misclassified " + std::to_string(a.misclassified + b.misclassified) +
                   (same ? "; 1 and 4 threads identical" : "; thread counts DIFFER") +
                   fmt("; %.1f s", secs));
    }

    // 9
    {
        const fs::path f1 = work / cache_file_name(Procedure::R1, kQ, 6765);
        const fs::path f3 = work / cache_file_name(Procedure::R3, kQ, 10779);
        save_table(*r1, f1);
        save_table(r3, f3);
        bool round = false;
        {
            const auto b1 = load_r1(f1, kQ);
            const auto b3 = load_r3(f3, kQ);
            round = same_bits(r1->binomial_plane(), b1.binomial_plane()) &&
                    same_bits(r1->defective_plane(), b1.defective_plane()) &&
                    same_bits(r1->choice_binomial_plane(), b1.choice_binomial_plane()) &&
                    same_bits(r1->choice_defective_plane(), b1.choice_defective_plane()) &&
                    same_bits(r3.expected_plane(), b3.expected_plane()) &&
                    same_bits(r3.defective_plane(), b3.defective_plane()) &&
                    same_bits(r3.choice_binomial_plane(), b3.choice_binomial_plane()) &&
                    same_bits(r3.choice_defective_plane(), b3.choice_defective_plane());
        }
        const auto cached = load_r3(*find_cached(work, Procedure::R3, kQ, 10000), kQ);
        const Count parts[] = {6765, 3235};
        const bool served = cached.expected(10000) == r3.expected(10000) &&
                            cached.expected(3235) == r3.expected(3235) &&
                            split_cost_r3(cached, parts) == split_cost_r3(r3, parts) &&
                            near(cached.expected(10000), 19.20284, 1e-5);

        const fs::path small = work / "acceptance_fuzz.gtdp", bad = work / "acceptance_fuzz_bad.gtdp";
        save_table(build_r1(make_prevalence(0.9), 25), small);
        std::ifstream in(small, std::ios::binary);
        const std::vector<char> bytes{std::istreambuf_iterator<char>(in), {}};
        std::mt19937_64 rng(9);
        int rejected = 0;
        for (int i = 0; i < 1000; ++i) {
            auto copy = bytes;
            copy[rng() % copy.size()] ^= char(1 + rng() % 255);
            {
                std::ofstream out(bad, std::ios::binary | std::ios::trunc);
                out.write(copy.data(), std::streamsize(copy.size()));
            }
            try {
                load_r1(bad, 0.9);
            } catch (const StoreError&) {
                ++rejected;
            }
        }
        fs::remove(small);
        fs::remove(bad);
        report(9, "persistence", round && served && rejected == 1000,
               std::string(round ? "round trip bitwise" : "round trip DIFFERS") +
                   (served ? "; cached R3 serves criterion 3 values" : "; cached values DIFFER") +
                   "; " + std::to_string(rejected) + "/1000 corruptions rejected");
    }

    // 10
    {
        const auto t = build_r3(p, 10000);
        std::istringstream all_neg("-\n");
        std::ostringstream sink;
        const auto s = run_session(Policy(t), 10000, all_neg, sink);
        bool ok = s.completed && s.state.tests_used == 1;

        std::mt19937_64 rng(10);
        const auto r1q = build_r1(make_prevalence(0.85), 30);
        const auto r3q = build_r3(make_prevalence(0.85), 30);
        int matched = 0;
        for (int rep = 0; rep < 20; ++rep) {
            const Count n = 1 + rng() % 30;
            std::vector<bool> truth(n);
            std::vector<Label> bad;
            for (Count i = 0; i < n; ++i) {
                truth[i] = rng() % 100 < 15;
                if (truth[i]) bad.push_back(Label(i));
            }
            const Policy pol = rep % 2 ? Policy(r1q) : Policy(r3q);
            const auto probe = run_probe(pol, truth);
            std::string script;
            for (const auto& st : probe.steps) script += st.group.intersects(bad) ? "+\n" : "-\n";
            std::istringstream in(script);
            std::ostringstream out;
            const auto r = run_session(pol, n, in, out);
            bool same = r.completed && r.steps.size() == probe.steps.size();
            for (std::size_t i = 0; same && i < r.steps.size(); ++i) {
                same = r.steps[i].group == probe.steps[i].group &&
                       r.steps[i].positive == probe.steps[i].positive;
            }
            matched += same;
        }
        ok = ok && matched == 20;
        report(10, "session replay", ok,
               "all-negative session at n=10000 used " + std::to_string(s.state.tests_used) +
                   " test(s); " + std::to_string(matched) + "/20 transcripts match probe runs");
    }

    if (failures) std::cout << failures << " of 10 criteria failed" << std::endl;
    else std::cout << "all 10 criteria passed" << std::endl;
    return failures ? 1 : 0;
}
