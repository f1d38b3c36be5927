#include "gtdp/engine_r3.hpp"

#include "gtdp/baselines.hpp"
#include "gtdp/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace gtdp {

namespace {

// The builder and the step re-evaluation share these two expressions so a
// stored value equals its recursion at the stored argmin bit for bit.
inline double defective_candidate(const double* pow, const double* one_minus, const double* d,
                                  const double* e, Count m, Count x)
{
    const double negative = pow[x] * one_minus[m - x] * d[m - x];
    const double positive = one_minus[x] * (d[x] + e[m - x]);
    return 1.0 + (negative + positive) / one_minus[m];
}

inline double binomial_candidate(const double* one_minus, const double* d, const double* e,
                                 Count n, Count x)
{
    return 1.0 + e[n - x] + one_minus[x] * d[x];
}

void check_index(Count i, Count n_top, const char* what)
{
    if (i > n_top) {
        throw RangeError(std::string(what) + " index " + std::to_string(i) +
                         " exceeds table size " + std::to_string(n_top));
    }
}

} // namespace

R3Table::R3Table(Prevalence prevalence, Count n_top, Count kernel_capacity)
    : kernel_(prevalence, kernel_capacity), expected_(n_top + 1, 0.0),
      defective_(n_top + 1, 0.0), choice_expected_(n_top + 1, 0), choice_defective_(n_top + 1, 0)
{
}

double R3Table::expected(Count n) const
{
    check_index(n, n_top(), "binomial");
    return expected_[n];
}

double R3Table::defective(Count m) const
{
    check_index(m, n_top(), "defective");
    if (m == 0) throw RangeError("defective set size must be >= 1");
    return defective_[m];
}

Count R3Table::choice_binomial(Count n) const
{
    check_index(n, n_top(), "binomial");
    if (n == 0) throw RangeError("an empty pool has no first test");
    return choice_expected_[n];
}

Count R3Table::choice_defective(Count m) const
{
    check_index(m, n_top(), "defective");
    if (m < 2) throw RangeError("a defective set of size < 2 needs no subtest");
    return choice_defective_[m];
}

std::size_t R3Table::footprint_bytes() const noexcept
{
    return kernel_.footprint_bytes() +
           (expected_.capacity() + defective_.capacity()) * sizeof(double) +
           (choice_expected_.capacity() + choice_defective_.capacity()) * sizeof(Choice);
}

R3Table R3Table::from_planes(Prevalence prevalence, std::vector<double> expected,
                             std::vector<double> defective, std::vector<Choice> choice_expected,
                             std::vector<Choice> choice_defective)
{
    if (expected.empty() || defective.size() != expected.size() ||
        choice_expected.size() != expected.size() || choice_defective.size() != expected.size()) {
        throw StoreError("R3 planes have inconsistent lengths");
    }
    const Count n_top = expected.size() - 1;
    R3Table table(prevalence, 0, engine_kernel_capacity(prevalence, n_top));
    table.expected_ = std::move(expected);
    table.defective_ = std::move(defective);
    table.choice_expected_ = std::move(choice_expected);
    table.choice_defective_ = std::move(choice_defective);
    // The file format does not record the n_max cap; loaded tables report the full range.
    table.search_cap_ = n_top;
    return table;
}

R3Table build_r3(Prevalence prevalence, Count n_top, bool cap_to_nmax)
{
    if (n_top >= std::numeric_limits<Choice>::max()) {
        throw CapacityError("population size " + std::to_string(n_top) +
                            " does not fit the 32-bit choice planes");
    }
    const Count nmax = n_max(prevalence);
    R3Table table(prevalence, n_top, engine_kernel_capacity(prevalence, n_top));
    table.capped_ = cap_to_nmax;
    table.search_cap_ = cap_to_nmax ? nmax : n_top;

    const double* pow = table.kernel_.pow_table().data();
    const double* one_minus = table.kernel_.one_minus_pow_table().data();
    double* e = table.expected_.data();
    double* d = table.defective_.data();

    for (Count t = 1; t <= n_top; ++t) {
        if (t >= 2) {
            double best = std::numeric_limits<double>::infinity();
            Count best_x = 1;
            for (Count x = 1; x < t; ++x) {
                const double v = defective_candidate(pow, one_minus, d, e, t, x);
                if (v < best) {
                    best = v;
                    best_x = x;
                }
            }
            d[t] = best;
            table.choice_defective_[t] = static_cast<Choice>(best_x);
        }

        const Count limit = cap_to_nmax ? std::min(t, nmax) : t;
        double best = std::numeric_limits<double>::infinity();
        Count best_x = 1;
        for (Count x = 1; x <= limit; ++x) {
            const double v = binomial_candidate(one_minus, d, e, t, x);
            if (v < best) {
                best = v;
                best_x = x;
            }
        }
        e[t] = best;
        table.choice_expected_[t] = static_cast<Choice>(best_x);
    }
    return table;
}

double r3_binomial_step(const R3Table& table, Count n, Count x)
{
    check_index(n, table.n_top(), "binomial");
    if (x == 0 || x > n) {
        throw ContractError("first test size must satisfy 1 <= x <= n (n=" + std::to_string(n) +
                            ", x=" + std::to_string(x) + ")");
    }
    return binomial_candidate(table.kernel().one_minus_pow_table().data(),
                              table.defective_plane().data(), table.expected_plane().data(), n, x);
}

double r3_defective_step(const R3Table& table, Count m, Count x)
{
    check_index(m, table.n_top(), "defective");
    if (m < 2 || x == 0 || x >= m) {
        throw ContractError("defective subtest requires m >= 2 and 1 <= x <= m-1");
    }
    return defective_candidate(table.kernel().pow_table().data(),
                               table.kernel().one_minus_pow_table().data(),
                               table.defective_plane().data(), table.expected_plane().data(), m, x);
}

Count first_test_size_r3(const R3Table& table, Count n)
{
    return table.choice_binomial(n);
}

double split_cost_r3(const R3Table& table, std::span<const Count> parts)
{
    if (parts.empty()) throw DomainError("split_cost_r3 needs at least one part");
    double total = 0.0;
    for (Count part : parts) total += table.expected(part);
    return total;
}

} // namespace gtdp
