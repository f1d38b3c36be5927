#include "gtdp/model.hpp"

#include "gtdp/errors.hpp"

#include <cmath>
#include <string>

namespace gtdp {

std::string_view to_string(Procedure p)
{
    return p == Procedure::R1 ? "r1" : "r3";
}

Procedure parse_procedure(std::string_view text)
{
    if (text == "r1" || text == "R1") return Procedure::R1;
    if (text == "r3" || text == "R3") return Procedure::R3;
    throw DomainError("procedure must be r1 or r3, got '" + std::string(text) + "'");
}

namespace {

double checked_q(double q)
{
    if (!std::isfinite(q)) throw DomainError("q must be finite");
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("q must satisfy 0 < q < 1, got " + std::to_string(q));
    }
    return q;
}

// q - 1 is exact for q >= 0.5, so log1p keeps the last bits of ln q that
// matter once it is multiplied by exponents in the tens of thousands.
double stable_log(double q)
{
    return q >= 0.5 ? std::log1p(q - 1.0) : std::log(q);
}

} // namespace

Prevalence::Prevalence(double q) : q_(checked_q(q)), ln_q_(stable_log(q_)) {}

Prevalence make_prevalence(double q)
{
    return Prevalence(q);
}

PowerKernel::PowerKernel(Prevalence prevalence, Count capacity)
    : prevalence_(prevalence), pow_(capacity + 1), one_minus_(capacity + 1)
{
    const double ln_q = prevalence_.ln_q();
    pow_[0] = 1.0;
    one_minus_[0] = 0.0;
    for (Count k = 1; k <= capacity; ++k) {
        const double y = static_cast<double>(k) * ln_q;
        pow_[k] = std::exp(y);
        one_minus_[k] = -std::expm1(y);
    }
}

double PowerKernel::pow_q(Count k) const
{
    if (k > capacity()) {
        throw CapacityError("exponent " + std::to_string(k) + " exceeds kernel capacity " +
                            std::to_string(capacity()));
    }
    return pow_[k];
}

double PowerKernel::one_minus_pow_q(Count k) const
{
    if (k > capacity()) {
        throw CapacityError("exponent " + std::to_string(k) + " exceeds kernel capacity " +
                            std::to_string(capacity()));
    }
    return one_minus_[k];
}

namespace {

void check_split(Count m, Count x)
{
    if (m < 2 || x == 0 || x >= m) {
        throw ContractError("defective split requires m >= 2 and 1 <= x <= m-1 (m=" +
                            std::to_string(m) + ", x=" + std::to_string(x) + ")");
    }
}

} // namespace

double neg_branch_prob(const PowerKernel& kernel, Count m, Count x)
{
    check_split(m, x);
    return kernel.pow_q(x) * kernel.one_minus_pow_q(m - x) / kernel.one_minus_pow_q(m);
}

double pos_branch_prob(const PowerKernel& kernel, Count m, Count x)
{
    check_split(m, x);
    return kernel.one_minus_pow_q(x) / kernel.one_minus_pow_q(m);
}

} // namespace gtdp
