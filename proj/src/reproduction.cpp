#include "gtdp/reproduction.hpp"

#include "gtdp/baselines.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <string>

namespace gtdp {

TableSource building_source(const R1Options& options)
{
    return {
        [](Prevalence p, Count n) { return build_r3(p, n); },
        [options](Prevalence p, Count n) { return build_r1(p, n, options); },
    };
}

namespace {

using Clock = std::chrono::steady_clock;

class Suite {
public:
    Suite(double q, const TableSource& source) : prevalence_(q), source_(source) {}

    const R3Table& r3()
    {
        if (!r3_) r3_.emplace(source_.r3(prevalence_, kReproductionR3Top));
        return *r3_;
    }

    const R1Table& r1()
    {
        if (!r1_) r1_.emplace(source_.r1(prevalence_, kReproductionR1Top));
        return *r1_;
    }

    const Prevalence& prevalence() const { return prevalence_; }

    template <class Compute>
    void value(std::string id, std::string description, double expected, double tolerance,
               Compute compute)
    {
        const auto start = Clock::now();
        ClaimResult c;
        c.id = std::move(id);
        c.description = std::move(description);
        c.computed = compute();
        c.expected = expected;
        c.tolerance = tolerance;
        c.passed = std::abs(c.computed - expected) <= tolerance;
        c.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        results_.push_back(std::move(c));
    }

    void observation(std::string id, std::string description, double observed, bool well_defined)
    {
        ClaimResult c;
        c.id = std::move(id);
        c.description = std::move(description);
        c.computed = observed;
        c.expected = observed;
        c.passed = well_defined;
        c.observational = true;
        results_.push_back(std::move(c));
    }

    std::vector<ClaimResult> take() { return std::move(results_); }

private:
    Prevalence prevalence_;
    const TableSource& source_;
    std::optional<R3Table> r3_;
    std::optional<R1Table> r1_;
    std::vector<ClaimResult> results_;
};

} // namespace

std::vector<ClaimResult> run_reproduction(double q, const TableSource& source)
{
    Suite s(q, source);

    s.value("r3_6765", "restricted procedure, n = 6765: expected tests", 12.94809, 1e-5,
            [&] { return s.r3().expected(6765); });
    s.value("r1_6765", "optimal nested procedure, n = 6765: expected tests", 10.14778, 1e-5,
            [&] { return s.r1().binomial(6765); });
    s.value("gap_6765", "restricted minus nested at n = 6765", 12.94809 - 10.14778, 2e-5,
            [&] { return s.r3().expected(6765) - s.r1().binomial(6765); });
    s.value("nested_dominates_6765", "nested value does not exceed restricted value (1 = holds)",
            1.0, 0.0, [&] { return s.r1().binomial(6765) <= s.r3().expected(6765) ? 1.0 : 0.0; });
    s.value("r3_10000", "restricted procedure, n = 10000: expected tests", 19.20284, 1e-5,
            [&] { return s.r3().expected(10000); });
    s.value("r3_3235", "restricted procedure, n = 3235: expected tests", 6.34621, 1e-5,
            [&] { return s.r3().expected(3235); });
    s.value("split_6765_3235", "cost of testing 10000 as separate groups of 6765 and 3235",
            19.2943, 2e-5, [&] {
                const Count parts[] = {6765, 3235};
                return split_cost_r3(s.r3(), parts);
            });
    s.value("split_penalty", "split cost minus E(10000)", 19.2943 - 19.20284, 2e-4, [&] {
        const Count parts[] = {6765, 3235};
        return split_cost_r3(s.r3(), parts) - s.r3().expected(10000);
    });
    for (Count n : {6765, 7000, 8000, 9000, 10000, 10500, 10778}) {
        s.value("first_test_" + std::to_string(n),
                "restricted procedure first tests all " + std::to_string(n) + " units",
                static_cast<double>(n), 0.0,
                [&] { return static_cast<double>(first_test_size_r3(s.r3(), n)); });
    }
    {
        const Count first = first_test_size_r3(s.r3(), 10779);
        s.observation("first_test_10779", "first test size at n = 10779 (observed)",
                      static_cast<double>(first), first >= 1 && first <= 10779);
    }
    s.value("n_max", "largest useful first group", 92099.0, 0.0,
            [&] { return static_cast<double>(n_max(s.prevalence())); });
    return s.take();
}

} // namespace gtdp
