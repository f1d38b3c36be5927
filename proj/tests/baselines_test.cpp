#include "gtdp/baselines.hpp"
#include "gtdp/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace gtdp;

TEST_SUITE("baselines") {

TEST_CASE("n_max examples")
{
    CHECK(n_max(make_prevalence(0.9999)) == 92099);
    CHECK(n_max(make_prevalence(0.5)) == 1);
    // ln 0.1 / ln 0.9 = 21.8543453267828 (mpmath)
    CHECK(n_max(make_prevalence(0.9)) == 22);
}

TEST_CASE("n_max guard lands exact integer ratios")
{
    // q^2 = 1 - q, so the ratio is exactly 2
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    CHECK(n_max(make_prevalence(golden)) == 2);
    CHECK(n_max(make_prevalence(0.5)) == 1);
}

TEST_CASE("n_max nonincreasing as q decreases")
{
    Count prev = n_max(make_prevalence(0.99999));
    for (double q = 0.99998; q > 0.01; q -= 0.00731) {
        const Count cur = n_max(make_prevalence(q));
        REQUIRE(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("dorfman cost")
{
    CHECK(std::abs(dorfman_cost(make_prevalence(0.9), 10, 2) - 6.9) <= 1e-12);
    CHECK_THROWS_AS(dorfman_cost(make_prevalence(0.9), 10, 1), DomainError);
    CHECK_THROWS_AS(dorfman_cost(make_prevalence(0.9), 10, 11), DomainError);
    // k = n with q^k negligible: n/k + n
    CHECK(std::abs(dorfman_cost(make_prevalence(0.1), 50, 50) - 51.0) <= 1e-9);
}

TEST_CASE("best dorfman at the reference instance")
{
    const auto p = make_prevalence(0.9999);
    const auto r = bound_report(p, 6765);
    CHECK(std::abs(r.dorfman_best - 134.0) <= 2.0);
    // independent scan with std::pow
    double best = 1e300;
    Count best_k = 0;
    for (Count k = 2; k <= 6765; ++k) {
        const double c = 6765.0 / k * (1.0 + k * (1.0 - std::pow(0.9999, double(k))));
        if (c < best) {
            best = c;
            best_k = k;
        }
    }
    CHECK(r.dorfman_best == doctest::Approx(best).epsilon(1e-12));
    CHECK(r.dorfman_best_k == best_k);
    CHECK(r.individual == 6765.0);
}

TEST_CASE("bound report below two units")
{
    const auto r = bound_report(make_prevalence(0.9), 1);
    CHECK(r.dorfman_best_k == 1);
    CHECK(r.dorfman_best == 1.0);
}

TEST_CASE("information bound")
{
    CHECK(info_bound(make_prevalence(0.5), 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(info_bound(make_prevalence(0.7), 0) == 0.0);
    const double b = info_bound(make_prevalence(0.9999), 6765);
    CHECK(b > 9.9);
    CHECK(b < 10.0);
    // mpmath: 6765 * H2(1 - 0.9999)
    CHECK(std::abs(b - 9.9650718191391181938) <= 1e-9);
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
}

TEST_CASE("bounds ordered")
{
    for (double q : {0.5, 0.9, 0.99, 0.999}) {
        for (Count n = 0; n <= 200; ++n) {
            const auto r = bound_report(make_prevalence(q), n);
            REQUIRE(r.info_bound <= r.individual + 1e-12);
        }
    }
}

TEST_CASE("engine kernel capacity")
{
    CHECK(engine_kernel_capacity(make_prevalence(0.9999), 10) == 92099);
    CHECK(engine_kernel_capacity(make_prevalence(0.5), 10) == 10);
    CHECK(engine_kernel_capacity(make_prevalence(1.0 - 1e-12), 10) == (Count{1} << 24));
}

}
