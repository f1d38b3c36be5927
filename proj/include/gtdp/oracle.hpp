#pragma once

#include "gtdp/model.hpp"

#include <cstdint>

namespace gtdp {

/// Largest population the policy enumerators accept.
inline constexpr Count kOracleMaxN = 7;
/// Largest population the labeled-unit search accepts.
inline constexpr Count kLabeledMaxN = 5;

struct OracleResult {
    double value = 0.0;
    /// Number of complete policy assignments that were evaluated.
    std::uint64_t policies = 0;
};

/// Minimum expected tests over every size-based nested policy rooted at n
/// binomial units: each reachable situation gets its own group size, each
/// complete assignment is evaluated exactly, and the best one is kept.
///
/// Shares no code with the engines; branch probabilities come straight from
/// std::pow.
OracleResult exhaustive_min_r1(const Prevalence& prevalence, Count n);

/// Same enumeration over the restricted class, where the untested part of a
/// defective set is resolved as its own isolated binomial problem.
OracleResult exhaustive_min_r3(const Prevalence& prevalence, Count n);

/// Best nested policy over labeled units, with arbitrary test subsets and
/// outcome probabilities obtained by summing over all 2^n truth vectors.
/// Used to confirm that the size-based state abstraction loses nothing.
double labeled_min_nested(const Prevalence& prevalence, Count n);

} // namespace gtdp
