#pragma once

// The four linear programs over a factor-graph model, the maps between
// their polytopes, and a plain-text dump format for regression tests.
//
// Cost coefficients are the exact rationals of the double log-evidence
// values; reduced costs are exact rational differences of those, so the
// cost offsets between formulations hold with no rounding at all.

#include "lprx/model.hpp"
#include "lprx/rational.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace lprx {

enum class FormulationKind { ExactVRep, ReducedExact, RelaxedQtilde, TheoreticalQ };

std::string_view formulation_name(FormulationKind kind);
/// Accepts "vrep", "reduced", "qtilde", "q".
FormulationKind parse_formulation(std::string_view name);

enum class VarKind {
    ConvexWeight, ///< (index into the enumerated global behaviour, -)
    GTilde,       ///< (variable, symbol >= 1)
    GBar,         ///< (variable, symbol)
    P,            ///< (factor, index into its sorted allowed list)
    CheckWord,    ///< equalizer w: (check, index into its even-weight words)
    EdgeMass,     ///< equalizer q: (symbol time, trellis edge)
};

struct VarKey {
    VarKind kind;
    std::size_t first;
    std::size_t second;

    friend bool operator==(const VarKey&, const VarKey&) = default;
};

std::string to_string(const VarKey& key);

struct Term {
    std::size_t var;
    int coeff;
};

/// sum(coeff * x[var]) == rhs
struct Constraint {
    std::vector<Term> terms;
    Rational rhs;
    std::string label;
};

/// Coordinates aligned with the variable catalog of some program or layout.
struct LpPoint {
    std::vector<Rational> values;

    friend bool operator==(const LpPoint&, const LpPoint&) = default;
};

/// maximize cost . x  subject to  equality rows, x >= 0.
struct LinearProgram {
    std::string name;
    std::vector<VarKey> variables;
    std::vector<Rational> cost;
    std::vector<Constraint> constraints;

    std::size_t num_variables() const noexcept { return variables.size(); }
    std::size_t num_constraints() const noexcept { return constraints.size(); }

    std::size_t add_variable(VarKey key, Rational cost_coefficient = 0);
    void add_constraint(std::vector<Term> terms, Rational rhs, std::string label);

    Rational objective(const LpPoint& point) const;
    /// Labels of every violated equality and every negative coordinate.
    std::vector<std::string> violations(const LpPoint& point) const;
    bool feasible(const LpPoint& point) const { return violations(point).empty(); }
};

/// Exact rationals of lambda (indexed by variable; empty for unobserved).
std::vector<std::vector<Rational>> rational_lambda(const FactorGraphModel& model);
/// rational_lambda[i][a] - rational_lambda[i][0] for a >= 1.
std::vector<std::vector<Rational>> rational_lambda_tilde(const FactorGraphModel& model);
/// Exact rational log score of x over the observed variables.
Rational rational_score(const FactorGraphModel& model, const Configuration& x);
/// The additive constant sum over Y of rat(log h_i(reference symbol)).
Rational reference_offset(const FactorGraphModel& model);

// Coordinate layouts (independent of the cost vector).

/// GTILDE block then P blocks.
struct QtildeLayout {
    explicit QtildeLayout(const FactorGraphModel& model);
    std::size_t gtilde(VariableId i, SymbolIndex a) const; ///< requires i observed, a >= 1
    std::size_t p(FactorId j, std::size_t tuple) const { return p_offset[j] + tuple; }
    std::size_t size;
    std::vector<std::size_t> gtilde_offset; ///< npos for unobserved variables
    std::vector<std::size_t> p_offset;
};

/// GBAR block (every variable) then P blocks.
struct QLayout {
    explicit QLayout(const FactorGraphModel& model);
    std::size_t gbar(VariableId i, SymbolIndex a) const { return gbar_offset[i] + a; }
    std::size_t p(FactorId j, std::size_t tuple) const { return p_offset[j] + tuple; }
    std::size_t size;
    std::vector<std::size_t> gbar_offset;
    std::vector<std::size_t> p_offset;
};

/// Hull of the indicator images of B, with one convex weight per member.
LinearProgram build_exact_vrep(const FactorGraphModel& model, const std::vector<Configuration>& behaviour);
LinearProgram build_exact_vrep(const FactorGraphModel& model, std::uint64_t cap = kDefaultEnumerationCap);
LinearProgram build_reduced_exact(const FactorGraphModel& model, const std::vector<Configuration>& behaviour);
LinearProgram build_reduced_exact(const FactorGraphModel& model, std::uint64_t cap = kDefaultEnumerationCap);

/// The relaxed polytope over (g~, p) with the lambda~ objective.
LinearProgram build_relaxed_qtilde(const FactorGraphModel& model);
/// The analysis polytope over (g-bar, p) with the lambda objective.
LinearProgram build_theoretical_q(const FactorGraphModel& model);

/// Removes exact duplicate rows (same terms, same rhs). Not applied by default.
LinearProgram deduplicate_constraints(LinearProgram program);

/// Per-variable blocks: block[i] has one entry per symbol (or per non-reference
/// symbol for g~). Blocks of unobserved variables are empty.
using BlockVector = std::vector<std::vector<Rational>>;

/// g~ -> g on the observed variables; the reference coordinate is the complement.
BlockVector map_W(const FactorGraphModel& model, const BlockVector& gtilde);
BlockVector map_W_inverse(const FactorGraphModel& model, const BlockVector& g);

/// Q~ point -> Q point. Throws ValidationError if the input is not in Q~.
LpPoint map_V(const FactorGraphModel& model, const LpPoint& qtilde_point);
/// Restriction of a Q point back to Q~ coordinates.
LpPoint map_V_inverse(const FactorGraphModel& model, const LpPoint& q_point);

/// The integral point (Xi-bar(x), p) of Q. Throws ValidationError if x is not in B.
LpPoint embed_configuration(const FactorGraphModel& model, const Configuration& x);
/// The same representative in Q~ coordinates.
LpPoint embed_configuration_qtilde(const FactorGraphModel& model, const Configuration& x);

/// Consequence check of the box and simplex inequalities implied by the
/// equality system (p <= 1, 0 <= g <= 1, per-variable sums). Empty when they hold.
struct DerivedReport {
    std::vector<std::string> violations;
    bool ok() const noexcept { return violations.empty(); }
};

/// Works from the catalog alone, so it also covers the equalizer programs
/// (w <= 1, q <= 1, per-section sums of q equal to 1).
DerivedReport verify_derived_constraints(const LinearProgram& program, const LpPoint& point);

/// Text dump: "cost: +c var ..." then one "label: +var -var = rhs" line per row.
std::string dump(const LinearProgram& program);
/// Parses a dump back. Variable names are kept as catalog keys.
LinearProgram parse_dump(std::string_view text);

} // namespace lprx
