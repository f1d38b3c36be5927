#pragma once

#include "gtdp/model.hpp"

#include <span>
#include <vector>

namespace gtdp {

/// Value and choice tables of the restricted nested procedure.
///
/// expected(n) is the optimal expected number of tests for n binomial units;
/// defective(m) is the expected number of further tests needed to resolve a
/// set of m units known to contain a defective, in isolation from any pool.
class R3Table {
public:
    const Prevalence& prevalence() const noexcept { return kernel_.prevalence(); }
    const PowerKernel& kernel() const noexcept { return kernel_; }
    Count n_top() const noexcept { return expected_.size() - 1; }
    bool capped_to_nmax() const noexcept { return capped_; }
    /// Largest first-test size the build was allowed to consider.
    Count search_cap() const noexcept { return search_cap_; }

    double expected(Count n) const;
    double defective(Count m) const;
    Count choice_binomial(Count n) const;
    Count choice_defective(Count m) const;

    /// Raw planes, indexed 0..n_top. D[0], choice_E[0], choice_D[0..1] are unused zeros.
    std::span<const double> expected_plane() const noexcept { return expected_; }
    std::span<const double> defective_plane() const noexcept { return defective_; }
    std::span<const Choice> choice_binomial_plane() const noexcept { return choice_expected_; }
    std::span<const Choice> choice_defective_plane() const noexcept { return choice_defective_; }

    std::size_t footprint_bytes() const noexcept;

    /// Reassembles a table from stored planes (used by the table store).
    static R3Table from_planes(Prevalence prevalence, std::vector<double> expected,
                               std::vector<double> defective, std::vector<Choice> choice_expected,
                               std::vector<Choice> choice_defective);

private:
    friend R3Table build_r3(Prevalence, Count, bool);
    R3Table(Prevalence prevalence, Count n_top, Count kernel_capacity);

    PowerKernel kernel_;
    bool capped_ = false;
    Count search_cap_ = 0;
    std::vector<double> expected_;
    std::vector<double> defective_;
    std::vector<Choice> choice_expected_;
    std::vector<Choice> choice_defective_;
};

/// Fills both planes for population sizes 0..n_top.
///
/// For each t the defective value D[t] is computed first, then E[t]:
///   D[m] = min_{1<=x<m} 1 + P(neg) D[m-x] + P(pos) (D[x] + E[m-x])
///   E[n] = min_{1<=x<=X} 1 + E[n-x] + (1 - q^x) D[x]
/// with X = n, or min(n, n_max) when cap_to_nmax is set. Ties go to the
/// smallest x.
R3Table build_r3(Prevalence prevalence, Count n_top, bool cap_to_nmax = false);

/// Cost of testing x first from n binomial units, given the finished table.
double r3_binomial_step(const R3Table& table, Count n, Count x);
/// Cost of subtesting x units of an isolated defective set of m.
double r3_defective_step(const R3Table& table, Count m, Count x);

Count first_test_size_r3(const R3Table& table, Count n);

/// Sum of E over independently handled subpopulations.
double split_cost_r3(const R3Table& table, std::span<const Count> parts);

} // namespace gtdp
