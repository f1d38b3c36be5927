#pragma once

#include "gtdp/engine_r1.hpp"
#include "gtdp/engine_r3.hpp"
#include "gtdp/model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gtdp {

/// One published figure, recomputed.
struct ClaimResult {
    std::string id;
    std::string description;
    double computed = 0.0;
    double expected = 0.0;
    /// Absolute tolerance; 0 means exact equality.
    double tolerance = 0.0;
    bool passed = false;
    /// Observations are reported but only need to be well defined.
    bool observational = false;
    /// Wall time of the claim, including any table build it triggered.
    double elapsed_ms = 0.0;
};

/// Builds (or loads) the tables the claims need. Defaults call the engines.
struct TableSource {
    std::function<R3Table(Prevalence, Count)> r3;
    std::function<R1Table(Prevalence, Count)> r1;
};

TableSource building_source(const R1Options& options = {});

/// Population sizes the reproduction suite needs from each engine.
inline constexpr Count kReproductionR3Top = 10779;
inline constexpr Count kReproductionR1Top = 6765;

/// Recomputes every published value for the q = 0.9999 example. Passing a
/// different q is a negative control: the value claims must then fail.
std::vector<ClaimResult> run_reproduction(double q, const TableSource& source);

} // namespace gtdp
