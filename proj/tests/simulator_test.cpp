#include "gtdp/engine_r1.hpp"
#include "gtdp/engine_r3.hpp"
#include "gtdp/errors.hpp"
#include "gtdp/simulator.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace gtdp;

namespace {

std::vector<Label> labels(const LabelSet& s) { return s.to_vector(); }

// Runs a policy on a truth vector, checking every transition.
void run_checked(const Policy& policy, const std::vector<bool>& truth)
{
    const Count n = truth.size();
    std::vector<Label> bad;
    for (Count i = 0; i < n; ++i) {
        if (truth[i]) bad.push_back(Label(i));
    }
    ExecutionState state = start_state(n);
    REQUIRE(partition_holds(state, n));
    while (auto group = next_group(state, policy)) {
        REQUIRE(!group->empty());
        if (state.outstanding_from_defective) {
            const Count m = state.defective_set.size();
            REQUIRE(m >= 2);
            REQUIRE(group->size() <= m - 1);
            for (Label l : labels(*group)) REQUIRE(state.defective_set.contains(l));
        }
        apply_outcome(state, *group, group->intersects(bad), policy.procedure());
        REQUIRE(partition_holds(state, n));
    }
    REQUIRE(is_complete(state));
    REQUIRE(state.classified_defective == LabelSet::of(bad));
}

} // namespace

TEST_SUITE("simulator") {

TEST_CASE("label set basics")
{
    auto s = LabelSet::range(0, 10);
    CHECK(s.size() == 10);
    CHECK(s.intervals().size() == 1);
    const auto head = s.take_front(4);
    CHECK(head == LabelSet::range(0, 4));
    CHECK(s == LabelSet::range(4, 10));
    s.insert(head);
    CHECK(s == LabelSet::range(0, 10));
    CHECK(s.intervals().size() == 1);
    const Label some[] = {2, 3, 7};
    const auto t = LabelSet::of(some);
    CHECK(format_labels(t) == "u3-u4,u8");
    CHECK(format_labels(LabelSet{}) == "{}");
    CHECK(t.front(3) == t);
    LabelSet moved = std::move(s);
    CHECK(s.size() == 0);
    CHECK(moved.size() == 10);
}

TEST_CASE("label set agrees with std::set")
{
    std::mt19937_64 rng(7);
    for (int round = 0; round < 200; ++round) {
        LabelSet s;
        std::set<Label> ref;
        for (int op = 0; op < 60; ++op) {
            const int kind = int(rng() % 3);
            if (kind < 2) {
                const Label a = Label(rng() % 200), len = Label(1 + rng() % 8);
                bool overlap = false;
                for (Label l = a; l < a + len; ++l) overlap |= ref.count(l) > 0;
                if (overlap) continue;
                s.insert(LabelSet::range(a, a + len));
                for (Label l = a; l < a + len; ++l) ref.insert(l);
            } else if (!ref.empty()) {
                const Count k = 1 + rng() % ref.size();
                const auto taken = s.take_front(k);
                std::vector<Label> expect;
                for (Count i = 0; i < k; ++i) {
                    expect.push_back(*ref.begin());
                    ref.erase(ref.begin());
                }
                REQUIRE(taken.to_vector() == expect);
            }
            REQUIRE(s.size() == ref.size());
            REQUIRE(s.to_vector() == std::vector<Label>(ref.begin(), ref.end()));
            const Label probe = Label(rng() % 210);
            REQUIRE(s.contains(probe) == (ref.count(probe) > 0));
            const Label pr[] = {probe, Label(probe + 3)};
            REQUIRE(s.intersects(pr) == (ref.count(pr[0]) + ref.count(pr[1]) > 0));
        }
    }
}

TEST_CASE("fresh states")
{
    const auto r3 = build_r3(make_prevalence(0.9999), 10000);
    const Policy p(r3);
    auto state = start_state(10000);
    const auto g = next_group(state, p);
    REQUIRE(g);
    CHECK(*g == LabelSet::range(0, 10000));
    // asking again returns the same group
    CHECK(*next_group(state, p) == *g);

    auto single = start_state(1);
    CHECK(*next_group(single, p) == LabelSet::range(0, 1));
}

TEST_CASE("singleton defective set is classified without a test")
{
    const auto t = build_r1(make_prevalence(0.5), 10);
    const Policy p(t);
    ExecutionState state;
    state.defective_set = LabelSet::range(6, 7);
    state.pool = LabelSet::range(8, 9);
    const auto g = next_group(state, p);
    REQUIRE(g);
    CHECK(*g == LabelSet::range(8, 9));
    CHECK(state.classified_defective == LabelSet::range(6, 7));
    CHECK(state.defective_set.empty());
    CHECK(state.tests_used == 0);
}

TEST_CASE("positive subtest transitions")
{
    for (Procedure proc : {Procedure::R1, Procedure::R3}) {
        ExecutionState state;
        state.defective_set = LabelSet::range(0, 3);
        state.pool = LabelSet::range(3, 5);
        state.outstanding = LabelSet::range(0, 1);
        state.outstanding_from_defective = true;
        apply_outcome(state, LabelSet::range(0, 1), true, proc);
        CHECK(state.defective_set == LabelSet::range(0, 1));
        CHECK(state.tests_used == 1);
        if (proc == Procedure::R1) {
            CHECK(state.pool == LabelSet::range(1, 5));
            CHECK(state.pending.empty());
        } else {
            CHECK(state.pool == LabelSet::range(3, 5));
            REQUIRE(state.pending.size() == 1);
            CHECK(state.pending.back() == LabelSet::range(1, 3));
        }
        CHECK(partition_holds(state, 5));
    }
}

TEST_CASE("negative whole-pool test completes")
{
    const auto t = build_r3(make_prevalence(0.9999), 100);
    const Policy p(t);
    auto state = start_state(100);
    const auto g = next_group(state, p);
    REQUIRE(g->size() == 100);
    apply_outcome(state, *g, false, p.procedure());
    CHECK(!next_group(state, p));
    CHECK(is_complete(state));
    CHECK(state.tests_used == 1);
    CHECK(state.classified_good.size() == 100);
}

TEST_CASE("protocol errors")
{
    const auto t = build_r1(make_prevalence(0.9), 10);
    const Policy p(t);
    auto state = start_state(10);
    CHECK_THROWS_AS(apply_outcome(state, LabelSet::range(0, 1), true, Procedure::R1),
                    ProtocolError);
    const auto g = next_group(state, p);
    CHECK_THROWS_AS(apply_outcome(state, LabelSet::range(5, 7), true, Procedure::R1),
                    ProtocolError);
    CHECK_NOTHROW(apply_outcome(state, *g, true, Procedure::R1));
}

TEST_CASE("probe edge cases")
{
    const auto r3 = build_r3(make_prevalence(0.9999), 100);
    const auto all_good = run_probe(Policy(r3), std::vector<bool>(100, false));
    CHECK(all_good.final_state.tests_used == 1);
    CHECK(all_good.classification_correct);

    // individual testing is optimal at q = 0.5
    for (Procedure proc : {Procedure::R1, Procedure::R3}) {
        const auto r1 = build_r1(make_prevalence(0.5), 20);
        const auto r3h = build_r3(make_prevalence(0.5), 20);
        const Policy p = proc == Procedure::R1 ? Policy(r1) : Policy(r3h);
        const auto all_bad = run_probe(p, std::vector<bool>(20, true));
        CHECK(all_bad.final_state.tests_used == 20);
        CHECK(all_bad.classification_correct);
    }
}

TEST_CASE("single defective at every position")
{
    const auto r1 = build_r1(make_prevalence(0.99), 40);
    const auto r3 = build_r3(make_prevalence(0.99), 40);
    for (const Policy& p : {Policy(r1), Policy(r3)}) {
        for (Count i = 0; i < 40; ++i) {
            std::vector<bool> truth(40, false);
            truth[i] = true;
            const auto r = run_probe(p, truth);
            CHECK(r.classification_correct);
            CHECK(r.final_state.classified_defective == LabelSet::range(Label(i), Label(i + 1)));
        }
    }
}

TEST_CASE("random runs keep the partition and nestedness")
{
    std::mt19937_64 rng(11);
    for (double q : {0.5, 0.8, 0.95}) {
        const auto r1 = build_r1(make_prevalence(q), 60);
        const auto r3 = build_r3(make_prevalence(q), 60);
        for (int rep = 0; rep < 100; ++rep) {
            const Count n = rng() % 61;
            std::vector<bool> truth(n);
            std::bernoulli_distribution bad(1.0 - q);
            for (Count i = 0; i < n; ++i) truth[i] = bad(rng);
            run_checked(Policy(r1), truth);
            run_checked(Policy(r3), truth);
        }
    }
}

TEST_CASE("draws are keyed by trial")
{
    const auto p = make_prevalence(0.9);
    const auto a = draw_defectives(p, 100, 42, 5);
    draw_defectives(p, 100, 42, 4);
    CHECK(draw_defectives(p, 100, 42, 5) == a);
    CHECK(std::is_sorted(a.begin(), a.end()));
    double total = 0;
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) total += double(draw_defectives(p, 100, 1, t).size());
    // binomial(100, 0.1): mean 10, sd 3, standard error of the mean 0.047
    CHECK(std::abs(total / trials - 10.0) < 0.25);
}

TEST_CASE("simulation agrees with the DP and is thread independent")
{
    const auto p = make_prevalence(0.9);
    const auto r1 = build_r1(p, 50);
    const auto r3 = build_r3(p, 50);
    for (const Policy& pol : {Policy(r1), Policy(r3)}) {
        const auto a = simulate(pol, 50, 20000, 99, 1);
        const auto b = simulate(pol, 50, 20000, 99, 3);
        CHECK(a.mean == b.mean);
        CHECK(a.std_error == b.std_error);
        CHECK(a.misclassified == 0);
        CHECK(a.trials == 20000);
        CHECK(std::abs(a.mean - pol.expected_tests(50)) <= 4.0 * a.std_error);
    }
}

TEST_CASE("simulation edge cases")
{
    const auto t = build_r3(make_prevalence(0.5), 5);
    const Policy p(t);
    const auto e = simulate(p, 5, 50, 1);
    CHECK(e.mean == 5.0);
    CHECK(e.std_error == 0.0);
    CHECK(simulate(p, 5, 1, 1).std_error == 0.0);
    CHECK_THROWS_AS(simulate(p, 5, 0, 1), DomainError);
    CHECK_THROWS_AS(simulate(p, 6, 10, 1), RangeError);
}

}
