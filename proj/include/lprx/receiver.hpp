#pragma once

// LP receiver: build one of the four programs, solve it exactly, and report
// either the decoded configuration (integral vertex) or a receiver failure
// carrying the fractional vertex.

#include "lprx/lp.hpp"
#include "lprx/simplex.hpp"

namespace lprx {

enum class OutcomeKind { Configuration, Failure };

std::string_view outcome_name(OutcomeKind kind);

struct ReceiverOutput {
    OutcomeKind kind = OutcomeKind::Failure;
    Configuration configuration; ///< empty on failure
    LinearProgram program;
    LpPoint point;               ///< the solver's vertex, in program coordinates
    FormulationKind formulation = FormulationKind::RelaxedQtilde;
    Rational objective;
    /// Set exactly when a configuration was decoded: an integral optimum is ML.
    bool certified_optimal = false;
    std::size_t pivot_count = 0;
};

struct ReceiverOptions {
    std::uint64_t cap = kDefaultEnumerationCap; ///< only the hull formulations enumerate
    SolveOptions solve;
};

/// Throws ConstructionError if the solver reports Infeasible or Unbounded.
ReceiverOutput run_receiver(const FactorGraphModel& model, FormulationKind formulation,
                            const ReceiverOptions& options = {});

/// LP objective of the representative of x in the given formulation.
Rational formulation_objective(const FactorGraphModel& model, FormulationKind formulation, const Configuration& x);

/// True for failures, and for configurations whose exact log score equals
/// the best score over B.
bool certify_against_oracle(const FactorGraphModel& model, const ReceiverOutput& output,
                            std::uint64_t cap = kDefaultEnumerationCap);

/// A failure whose LP optimum is attained by some valid configuration too,
/// i.e. the optimal face also holds an integral vertex the solver did not return.
bool failure_with_integral_optimum(const FactorGraphModel& model, const ReceiverOutput& output,
                                   std::uint64_t cap = kDefaultEnumerationCap);

} // namespace lprx
