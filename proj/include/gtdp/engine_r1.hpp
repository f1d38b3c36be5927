#pragma once

#include "gtdp/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace gtdp {

struct R1Options {
    /// For G, scan a window around the neighbouring state's argmin, widening
    /// it until the minimum is interior, instead of scanning every x. H is
    /// always scanned in full. A heuristic: it assumes the G cost has one
    /// local minimum near the neighbour's choice. Off by default.
    bool windowed_search = false;
    /// Build is refused when the planes (including the transient work plane)
    /// would exceed this many bytes.
    std::size_t memory_budget_bytes = std::size_t{2} << 30;
};

/// Value and choice tables of the optimal nested procedure.
///
/// binomial(n) = H[n]; defective(m, n) = G[m, n] for a defective set of m
/// beside a pool of n, m + n <= n_top. G is kept in a triangular plane with
/// row s = m + n holding m = 1..s; G[1, n] = H[n].
class R1Table {
public:
    const Prevalence& prevalence() const noexcept { return kernel_.prevalence(); }
    const PowerKernel& kernel() const noexcept { return kernel_; }
    Count n_top() const noexcept { return binomial_.size() - 1; }

    double binomial(Count n) const;
    double defective(Count m, Count n) const;
    Count choice_binomial(Count n) const;
    Count choice_defective(Count m, Count n) const;

    std::span<const double> binomial_plane() const noexcept { return binomial_; }
    std::span<const double> defective_plane() const noexcept { return defective_; }
    std::span<const Choice> choice_binomial_plane() const noexcept { return choice_binomial_; }
    std::span<const Choice> choice_defective_plane() const noexcept { return choice_defective_; }

    /// Number of entries of the triangular plane for a given n_top.
    static std::size_t triangle_size(Count n_top) noexcept { return n_top * (n_top + 1) / 2; }
    /// Flat index of G[m, n] in the triangular plane.
    static std::size_t triangle_index(Count m, Count n) noexcept
    {
        const std::size_t s = m + n;
        return s * (s - 1) / 2 + (m - 1);
    }

    std::size_t footprint_bytes() const noexcept;

    static R1Table from_planes(Prevalence prevalence, std::vector<double> binomial,
                               std::vector<double> defective, std::vector<Choice> choice_binomial,
                               std::vector<Choice> choice_defective);

private:
    friend R1Table build_r1(Prevalence, Count, const R1Options&);
    R1Table(Prevalence prevalence, Count n_top, Count kernel_capacity);

    PowerKernel kernel_;
    std::vector<double> binomial_;
    std::vector<double> defective_;
    std::vector<Choice> choice_binomial_;
    std::vector<Choice> choice_defective_;
};

/// Bytes build_r1 needs at peak for n_top, transient work plane included.
std::size_t r1_build_footprint(Count n_top) noexcept;

/// Fills H and G by increasing total s = m + n, and within s by increasing m:
///   G[m, n] = 1 + min_{1<=x<m} P(neg) G[m-x, n] + P(pos) G[x, m-x+n]
///   H[n]    = min_{1<=x<=n} 1 + q^x H[n-x] + (1 - q^x) G[x, n-x]
/// After a positive subtest the untested m - x units rejoin the pool.
/// Ties go to the smallest x.
R1Table build_r1(Prevalence prevalence, Count n_top, const R1Options& options = {});

double value_r1(const R1Table& table, BinomialState state);
double value_r1(const R1Table& table, DefectiveState state);

/// The recursion for one candidate x, evaluated from the finished table.
double r1_binomial_step(const R1Table& table, Count n, Count x);
double r1_defective_step(const R1Table& table, Count m, Count n, Count x);

} // namespace gtdp
