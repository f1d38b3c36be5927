#pragma once

#include "gtdp/model.hpp"

namespace gtdp {

/// Closed-form reference costs for one (q, n) instance.
struct BoundReport {
    Count n = 0;
    double q = 0.0;
    double individual = 0.0;
    double dorfman_best = 0.0;
    /// 1 when n < 2 (no pooled Dorfman design exists; individual testing is reported).
    Count dorfman_best_k = 1;
    double info_bound = 0.0;
};

/// Largest group worth testing first: ceil(ln(1-q) / ln q).
///
/// A ratio within 1e-9 of an integer is treated as that integer so the
/// ceiling does not depend on the last bit of the two logarithms.
Count n_max(const Prevalence& prevalence);

/// Expected tests of two-stage Dorfman testing with groups of k:
/// (n/k) * (1 + k (1 - q^k)). Fractional group counts are allowed.
double dorfman_cost(const Prevalence& prevalence, Count n, Count k);

/// Binary entropy in bits of a Bernoulli(p) outcome; 0 at p in {0, 1}.
double binary_entropy(double p);

/// n * H2(1 - q): no adaptive binary-test procedure can average fewer tests.
double info_bound(const Prevalence& prevalence, Count n);

/// Individual, best-k Dorfman (k scanned over 2..n) and entropy bound.
BoundReport bound_report(const Prevalence& prevalence, Count n);

} // namespace gtdp

namespace gtdp {

/// Kernel capacity used by the engines: max(n, n_max(q)), with the n_max
/// contribution clamped at 2^24 so q extremely close to 1 cannot demand a
/// table far larger than any population the engines can hold.
Count engine_kernel_capacity(const Prevalence& prevalence, Count n);

} // namespace gtdp
