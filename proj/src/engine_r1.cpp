#include "gtdp/engine_r1.hpp"

#include "gtdp/baselines.hpp"
#include "gtdp/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace gtdp {

namespace {

struct ArgMin {
    double term;
    Count x;
};

// Every R1 candidate has the shape a[x]*u[x] + b[x]*v[x]; the callers shift
// the pointers so that x indexes all four arrays directly. Returns the
// smallest x attaining the minimum over [lo, hi].
//
// Four independent lanes keep the compare chains short; each lane keeps its
// first minimiser, and the merge picks the smallest x among equal minima, so
// the result matches a plain left-to-right strict-< scan.
ArgMin scan_terms(const double* __restrict a, const double* __restrict u,
                  const double* __restrict b, const double* __restrict v, Count lo, Count hi)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    double best[4] = {inf, inf, inf, inf};
    Count where[4] = {lo, lo, lo, lo};
    Count x = lo;
    for (; x + 3 <= hi; x += 4) {
        for (int lane = 0; lane < 4; ++lane) {
            const Count k = x + static_cast<Count>(lane);
            const double t = a[k] * u[k] + b[k] * v[k];
            if (t < best[lane]) {
                best[lane] = t;
                where[lane] = k;
            }
        }
    }
    ArgMin result{inf, lo};
    for (int lane = 0; lane < 4; ++lane) {
        if (best[lane] < result.term || (best[lane] == result.term && where[lane] < result.x)) {
            result = {best[lane], where[lane]};
        }
    }
    for (; x <= hi; ++x) {
        const double t = a[x] * u[x] + b[x] * v[x];
        if (t < result.term) result = {t, x};
    }
    return result;
}

// Scans a window around `guess`, doubling it on whichever side still holds
// the minimum, until the minimiser is strictly inside or the window covers
// [1, hi].
ArgMin scan_window(const double* a, const double* u, const double* b, const double* v,
                   Count guess, Count hi)
{
    constexpr Count kHalfWidth = 4;
    guess = std::clamp<Count>(guess, 1, hi);
    Count lo_w = guess > kHalfWidth ? guess - kHalfWidth : 1;
    Count hi_w = std::min(hi, guess + kHalfWidth);
    ArgMin best = scan_terms(a, u, b, v, lo_w, hi_w);
    Count grow = 2 * kHalfWidth;
    for (;;) {
        const bool extend_low = best.x == lo_w && lo_w > 1;
        const bool extend_high = best.x == hi_w && hi_w < hi;
        if (!extend_low && !extend_high) return best;
        if (extend_low) {
            const Count new_lo = lo_w > grow ? lo_w - grow : 1;
            const ArgMin part = scan_terms(a, u, b, v, new_lo, lo_w - 1);
            if (part.term <= best.term) best = part;
            lo_w = new_lo;
        }
        if (extend_high) {
            const Count new_hi = std::min(hi, hi_w + grow);
            const ArgMin part = scan_terms(a, u, b, v, hi_w + 1, new_hi);
            if (part.term < best.term) best = part;
            hi_w = new_hi;
        }
        grow *= 2;
    }
}

void check_state(Count m, Count n, Count n_top)
{
    if (m == 0) throw RangeError("defective set size must be >= 1");
    if (m + n > n_top) {
        throw RangeError("state (m=" + std::to_string(m) + ", n=" + std::to_string(n) +
                         ") exceeds table size " + std::to_string(n_top));
    }
}

void check_pool(Count n, Count n_top)
{
    if (n > n_top) {
        throw RangeError("pool size " + std::to_string(n) + " exceeds table size " +
                         std::to_string(n_top));
    }
}

} // namespace

R1Table::R1Table(Prevalence prevalence, Count n_top, Count kernel_capacity)
    : kernel_(prevalence, kernel_capacity), binomial_(n_top + 1, 0.0),
      defective_(triangle_size(n_top), 0.0), choice_binomial_(n_top + 1, 0),
      choice_defective_(triangle_size(n_top), 0)
{
}

double R1Table::binomial(Count n) const
{
    check_pool(n, n_top());
    return binomial_[n];
}

double R1Table::defective(Count m, Count n) const
{
    check_state(m, n, n_top());
    return defective_[triangle_index(m, n)];
}

Count R1Table::choice_binomial(Count n) const
{
    check_pool(n, n_top());
    if (n == 0) throw RangeError("an empty pool has no first test");
    return choice_binomial_[n];
}

Count R1Table::choice_defective(Count m, Count n) const
{
    check_state(m, n, n_top());
    if (m < 2) throw RangeError("a defective set of size < 2 needs no subtest");
    return choice_defective_[triangle_index(m, n)];
}

std::size_t R1Table::footprint_bytes() const noexcept
{
    return kernel_.footprint_bytes() + (binomial_.capacity() + defective_.capacity()) * sizeof(double) +
           (choice_binomial_.capacity() + choice_defective_.capacity()) * sizeof(Choice);
}

R1Table R1Table::from_planes(Prevalence prevalence, std::vector<double> binomial,
                             std::vector<double> defective, std::vector<Choice> choice_binomial,
                             std::vector<Choice> choice_defective)
{
    if (binomial.empty() || choice_binomial.size() != binomial.size()) {
        throw StoreError("R1 binomial planes have inconsistent lengths");
    }
    const Count n_top = binomial.size() - 1;
    if (defective.size() != triangle_size(n_top) || choice_defective.size() != defective.size()) {
        throw StoreError("R1 triangular planes do not match n_top = " + std::to_string(n_top));
    }
    R1Table table(prevalence, 0, engine_kernel_capacity(prevalence, n_top));
    table.binomial_ = std::move(binomial);
    table.defective_ = std::move(defective);
    table.choice_binomial_ = std::move(choice_binomial);
    table.choice_defective_ = std::move(choice_defective);
    return table;
}

std::size_t r1_build_footprint(Count n_top) noexcept
{
    const std::size_t tri = R1Table::triangle_size(n_top);
    // G plane, choice plane, and the pool-major work plane.
    return tri * (2 * sizeof(double) + sizeof(Choice)) +
           (n_top + 1) * (2 * sizeof(double) + sizeof(Choice));
}

R1Table build_r1(Prevalence prevalence, Count n_top, const R1Options& options)
{
    if (n_top >= std::numeric_limits<Choice>::max()) {
        throw CapacityError("population size " + std::to_string(n_top) +
                            " does not fit the 32-bit choice planes");
    }
    const std::size_t need = r1_build_footprint(n_top);
    if (need > options.memory_budget_bytes) {
        throw ResourceError("R1 build for n_top = " + std::to_string(n_top) + " needs a " +
                            std::to_string(R1Table::triangle_size(n_top)) +
                            "-entry triangular plane (" + std::to_string(need >> 20) +
                            " MiB), over the budget of " +
                            std::to_string(options.memory_budget_bytes >> 20) + " MiB");
    }

    R1Table table(prevalence, n_top, engine_kernel_capacity(prevalence, n_top));
    if (n_top == 0) return table;

    const double* pow = table.kernel_.pow_table().data();
    const double* one_minus = table.kernel_.one_minus_pow_table().data();
    double* h = table.binomial_.data();
    double* g = table.defective_.data();
    Choice* choice_h = table.choice_binomial_.data();
    Choice* choice_g = table.choice_defective_.data();

    // Work planes arranged so that every scan walks forward through memory:
    //  - pool_plane holds (1 - q^j) G[j, n] for fixed pool n, stored with j
    //    descending, so the negative-branch operand G[m - x, n] is read with
    //    x ascending;
    //  - h_rev holds H reversed so H[n - x] is read with x ascending.
    std::vector<double> pool_plane(R1Table::triangle_size(n_top));
    std::vector<double> h_rev(n_top + 1, 0.0);
    auto pool_offset = [n_top](Count n) { return n * n_top - n * (n - 1) / 2; };
    auto pool_slot = [&](Count j, Count n) {
        return pool_offset(n) + (n_top - n - j);
    };

    for (Count s = 1; s <= n_top; ++s) {
        double* row = g + R1Table::triangle_index(1, s - 1);
        Choice* choice_row = choice_g + R1Table::triangle_index(1, s - 1);
        // row[m - 1] = G[m, s - m]
        row[0] = h[s - 1];
        pool_plane[pool_slot(1, s - 1)] = one_minus[1] * h[s - 1];
        const double* row_x = row - 1; // row_x[x] = G[x, s - x]

        for (Count m = 2; m <= s; ++m) {
            const Count n = s - m;
            const double* u = pool_plane.data() + pool_slot(m, n);
            ArgMin best;
            if (options.windowed_search) {
                const Count guess = n > 0 ? choice_g[R1Table::triangle_index(m, n - 1)]
                                          : choice_row[m - 2];
                best = scan_window(pow, u, one_minus, row_x, guess == 0 ? 1 : guess, m - 1);
            } else {
                best = scan_terms(pow, u, one_minus, row_x, 1, m - 1);
            }
            const double value = 1.0 + best.term / one_minus[m];
            row[m - 1] = value;
            choice_row[m - 1] = static_cast<Choice>(best.x);
            if (m + n < n_top) pool_plane[pool_slot(m, n)] = one_minus[m] * value;
        }

        const double* u = h_rev.data() + (n_top - s); // u[x] = H[s - x]
        // always a full scan: this cost can have two local minima (a mid-size
        // group and the whole pool) and the global one jumps between them
        const ArgMin best = scan_terms(pow, u, one_minus, row_x, 1, s);
        h[s] = 1.0 + best.term;
        choice_h[s] = static_cast<Choice>(best.x);
        h_rev[n_top - s] = h[s];
    }
    return table;
}

double value_r1(const R1Table& table, BinomialState state)
{
    return table.binomial(state.n);
}

double value_r1(const R1Table& table, DefectiveState state)
{
    if (state.m == 1) {
        check_state(state.m, state.n, table.n_top());
        return table.binomial(state.n);
    }
    return table.defective(state.m, state.n);
}

double r1_binomial_step(const R1Table& table, Count n, Count x)
{
    check_pool(n, table.n_top());
    if (x == 0 || x > n) {
        throw ContractError("first test size must satisfy 1 <= x <= n (n=" + std::to_string(n) +
                            ", x=" + std::to_string(x) + ")");
    }
    const auto& k = table.kernel();
    const double term = k.pow_q(x) * table.binomial(n - x) +
                        k.one_minus_pow_q(x) * table.defective(x, n - x);
    return 1.0 + term;
}

double r1_defective_step(const R1Table& table, Count m, Count n, Count x)
{
    check_state(m, n, table.n_top());
    if (m < 2 || x == 0 || x >= m) {
        throw ContractError("defective subtest requires m >= 2 and 1 <= x <= m-1");
    }
    const auto& k = table.kernel();
    const double negative = k.one_minus_pow_q(m - x) * table.defective(m - x, n);
    const double term = k.pow_q(x) * negative + k.one_minus_pow_q(x) * table.defective(x, m - x + n);
    return 1.0 + term / k.one_minus_pow_q(m);
}

} // namespace gtdp
