#include "lprx/receiver.hpp"

#include "lprx/error.hpp"

namespace lprx {

std::string_view outcome_name(OutcomeKind kind)
{
    return kind == OutcomeKind::Configuration ? "configuration" : "failure";
}

namespace {

Configuration decode_hull(const LinearProgram& lp, const LpPoint& point, const std::vector<Configuration>& behaviour)
{
    for (std::size_t k = 0; k < lp.num_variables(); ++k) {
        if (lp.variables[k].kind == VarKind::ConvexWeight && point.values[k] == 1) {
            return behaviour.at(lp.variables[k].first);
        }
    }
    throw ConstructionError("integral hull vertex without a unit convex weight");
}

Configuration decode_qtilde(const FactorGraphModel& model, const LpPoint& point)
{
    const QtildeLayout layout(model);
    Configuration x(model.num_variables(), 0);
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        if (model.observed(i)) {
            for (SymbolIndex a = 1; a < model.alphabet(i).size(); ++a) {
                if (point.values[layout.gtilde(i, a)] == 1) {
                    x[i] = a;
                }
            }
        } else {
            // Hidden symbols come from the unit mass of the anchor factor.
            const FactorId t = model.anchor(i);
            const auto& allowed = model.behaviour(t).allowed;
            for (std::size_t b = 0; b < allowed.size(); ++b) {
                if (point.values[layout.p(t, b)] == 1) {
                    x[i] = allowed[b][model.scope_position(t, i)];
                }
            }
        }
    }
    return x;
}

Configuration decode_q(const FactorGraphModel& model, const LpPoint& point)
{
    const QLayout layout(model);
    Configuration x(model.num_variables(), 0);
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        for (SymbolIndex a = 0; a < model.alphabet(i).size(); ++a) {
            if (point.values[layout.gbar(i, a)] == 1) {
                x[i] = a;
            }
        }
    }
    return x;
}

} // namespace

ReceiverOutput run_receiver(const FactorGraphModel& model, FormulationKind formulation, const ReceiverOptions& options)
{
    ReceiverOutput out;
    out.formulation = formulation;
    std::vector<Configuration> behaviour;
    switch (formulation) {
    case FormulationKind::ExactVRep:
        behaviour = global_behaviour(model, options.cap);
        out.program = build_exact_vrep(model, behaviour);
        break;
    case FormulationKind::ReducedExact:
        behaviour = global_behaviour(model, options.cap);
        out.program = build_reduced_exact(model, behaviour);
        break;
    case FormulationKind::RelaxedQtilde: out.program = build_relaxed_qtilde(model); break;
    case FormulationKind::TheoreticalQ: out.program = build_theoretical_q(model); break;
    }
    auto result = solve(out.program, options.solve);
    if (result.status != SolveStatus::Optimal) {
        throw ConstructionError(std::string("receiver LP is ") + std::string(status_name(result.status))
                                + "; the polytope construction is broken");
    }
    out.point = std::move(result.point);
    out.objective = std::move(result.objective);
    out.pivot_count = result.pivot_count;
    if (!is_integral(out.point)) {
        out.kind = OutcomeKind::Failure;
        return out;
    }
    switch (formulation) {
    case FormulationKind::ExactVRep:
    case FormulationKind::ReducedExact: out.configuration = decode_hull(out.program, out.point, behaviour); break;
    case FormulationKind::RelaxedQtilde: out.configuration = decode_qtilde(model, out.point); break;
    case FormulationKind::TheoreticalQ: out.configuration = decode_q(model, out.point); break;
    }
    if (!model.is_valid(out.configuration)) {
        throw ConstructionError("integral LP vertex decoded to an invalid configuration");
    }
    out.kind = OutcomeKind::Configuration;
    out.certified_optimal = true;
    return out;
}

Rational formulation_objective(const FactorGraphModel& model, FormulationKind formulation, const Configuration& x)
{
    Rational score = rational_score(model, x);
    if (formulation == FormulationKind::ReducedExact || formulation == FormulationKind::RelaxedQtilde) {
        score -= reference_offset(model);
    }
    return score;
}

namespace {

Rational best_score(const FactorGraphModel& model, std::uint64_t cap)
{
    const auto behaviour = global_behaviour(model, cap);
    if (behaviour.empty()) {
        throw ValidationError("no valid configuration: the global behaviour is empty");
    }
    Rational best = rational_score(model, behaviour.front());
    for (const auto& x : behaviour) {
        if (auto s = rational_score(model, x); s > best) {
            best = s;
        }
    }
    return best;
}

} // namespace

bool certify_against_oracle(const FactorGraphModel& model, const ReceiverOutput& output, std::uint64_t cap)
{
    if (output.kind == OutcomeKind::Failure) {
        return true;
    }
    return rational_score(model, output.configuration) == best_score(model, cap);
}

bool failure_with_integral_optimum(const FactorGraphModel& model, const ReceiverOutput& output, std::uint64_t cap)
{
    if (output.kind != OutcomeKind::Failure) {
        return false;
    }
    Rational best = best_score(model, cap);
    if (output.formulation == FormulationKind::ReducedExact || output.formulation == FormulationKind::RelaxedQtilde) {
        best -= reference_offset(model);
    }
    return best == output.objective;
}

} // namespace lprx
