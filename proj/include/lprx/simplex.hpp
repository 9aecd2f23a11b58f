#pragma once

// Exact two-phase primal simplex over arbitrary-precision rationals with
// Bland's lowest-index rule for both the entering and the leaving variable.
//
// An optional double-precision solve proposes a starting basis. It is only a
// hint: the exact tableau is rebuilt on that basis, checked for feasibility,
// and phase II runs exactly from there; a rejected hint falls back to the cold
// two-phase method. Optimality is always established in exact arithmetic.

#include "lprx/lp.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace lprx {

enum class SolveStatus { Optimal, Infeasible, Unbounded };

std::string_view status_name(SolveStatus status);

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    LpPoint point;              ///< a vertex; only meaningful when Optimal
    Rational objective;         ///< cost . point, exact
    std::vector<std::size_t> basis;
    std::size_t pivot_count = 0;
    bool warm_started = false;  ///< the floating-point basis hint was accepted
};

struct SolveOptions {
    /// Abort with ConstructionError after this many pivots; 0 means no limit.
    std::size_t pivot_limit = 0;
    bool warm_start = true;
};

SolveResult solve(const LinearProgram& program, const SolveOptions& options = {});

/// True iff every coordinate is exactly 0 or 1.
bool is_integral(const LpPoint& point);

} // namespace lprx
