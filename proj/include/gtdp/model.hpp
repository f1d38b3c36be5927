#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace gtdp {

using Count = std::size_t;
/// Group-size choices are stored in 32-bit planes.
using Choice = std::uint32_t;

enum class Procedure : std::uint8_t {
    R1 = 1, ///< optimal nested: remainders of a defective set rejoin the pool
    R3 = 3, ///< restricted nested: remainders are resolved in isolation
};

std::string_view to_string(Procedure p);
/// Accepts "r1"/"R1"/"r3"/"R3"; throws DomainError otherwise.
Procedure parse_procedure(std::string_view text);

/// Probability that a single unit is good. Always strictly inside (0, 1).
class Prevalence {
public:
    explicit Prevalence(double q);

    double q() const noexcept { return q_; }
    /// 1 - q, exact for q >= 0.5.
    double p() const noexcept { return 1.0 - q_; }
    double ln_q() const noexcept { return ln_q_; }

    friend bool operator==(const Prevalence&, const Prevalence&) = default;

private:
    double q_;
    double ln_q_;
};

Prevalence make_prevalence(double q);

/// n unclassified units, each good with probability q independently.
struct BinomialState {
    Count n = 0;
};

/// m units known to hold at least one defective, alongside a binomial pool of n.
struct DefectiveState {
    Count m = 1;
    Count n = 0;
};

/// Number of units in the next pooled test.
struct GroupChoice {
    Count x = 1;
};

/// Precomputed q^k and 1 - q^k for 0 <= k <= capacity.
///
/// Both tables come from the cached ln q, never from repeated multiplication,
/// and 1 - q^k uses expm1 so it keeps full relative precision when q^k is
/// close to 1.
class PowerKernel {
public:
    PowerKernel(Prevalence prevalence, Count capacity);

    const Prevalence& prevalence() const noexcept { return prevalence_; }
    Count capacity() const noexcept { return pow_.size() - 1; }

    double pow_q(Count k) const;
    double one_minus_pow_q(Count k) const;

    /// Unchecked views for hot loops; index k holds the value for exponent k.
    std::span<const double> pow_table() const noexcept { return pow_; }
    std::span<const double> one_minus_pow_table() const noexcept { return one_minus_; }

    std::size_t footprint_bytes() const noexcept {
        return (pow_.capacity() + one_minus_.capacity()) * sizeof(double);
    }

private:
    Prevalence prevalence_;
    std::vector<double> pow_;
    std::vector<double> one_minus_;
};

/// Probability that a subtest of x units drawn from a defective set of m is
/// negative: (q^x - q^m) / (1 - q^m). Requires m >= 2 and 1 <= x <= m - 1.
double neg_branch_prob(const PowerKernel& kernel, Count m, Count x);
/// Complement of neg_branch_prob: (1 - q^x) / (1 - q^m).
double pos_branch_prob(const PowerKernel& kernel, Count m, Count x);

} // namespace gtdp
