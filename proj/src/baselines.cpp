#include "gtdp/baselines.hpp"

#include "gtdp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gtdp {

Count n_max(const Prevalence& prevalence)
{
    const double ratio = std::log1p(-prevalence.q()) / prevalence.ln_q();
    const double nearest = std::round(ratio);
    const double value = std::abs(ratio - nearest) < 1e-9 ? nearest : std::ceil(ratio);
    return value < 1.0 ? 1 : static_cast<Count>(value);
}

double dorfman_cost(const Prevalence& prevalence, Count n, Count k)
{
    if (k < 2) throw DomainError("Dorfman group size must be >= 2, got " + std::to_string(k));
    if (k > n) {
        throw DomainError("Dorfman group size " + std::to_string(k) + " exceeds n = " +
                          std::to_string(n));
    }
    const double kd = static_cast<double>(k);
    const double positive = -std::expm1(kd * prevalence.ln_q());
    return static_cast<double>(n) / kd * (1.0 + kd * positive);
}

double binary_entropy(double p)
{
    if (p <= 0.0 || p >= 1.0) return 0.0;
    const double q = 1.0 - p;
    return -(p * std::log2(p) + q * std::log2(q));
}

double info_bound(const Prevalence& prevalence, Count n)
{
    if (n == 0) return 0.0;
    return static_cast<double>(n) * binary_entropy(prevalence.p());
}

BoundReport bound_report(const Prevalence& prevalence, Count n)
{
    BoundReport report;
    report.n = n;
    report.q = prevalence.q();
    report.individual = static_cast<double>(n);
    report.dorfman_best = report.individual;
    report.dorfman_best_k = 1;
    report.info_bound = info_bound(prevalence, n);
    for (Count k = 2; k <= n; ++k) {
        const double cost = dorfman_cost(prevalence, n, k);
        if (report.dorfman_best_k == 1 || cost < report.dorfman_best) {
            report.dorfman_best = cost;
            report.dorfman_best_k = k;
        }
    }
    return report;
}

} // namespace gtdp

namespace gtdp {

Count engine_kernel_capacity(const Prevalence& prevalence, Count n)
{
    constexpr Count kNmaxClamp = Count{1} << 24;
    const Count cap = std::min(n_max(prevalence), kNmaxClamp);
    return std::max(n, cap);
}

} // namespace gtdp
