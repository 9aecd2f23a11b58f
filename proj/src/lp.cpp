#include "lprx/lp.hpp"

#include "lprx/error.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace lprx {

namespace {
constexpr std::size_t npos = static_cast<std::size_t>(-1);
}

std::string_view formulation_name(FormulationKind kind)
{
    switch (kind) {
    case FormulationKind::ExactVRep: return "vrep";
    case FormulationKind::ReducedExact: return "reduced";
    case FormulationKind::RelaxedQtilde: return "qtilde";
    case FormulationKind::TheoreticalQ: return "q";
    }
    return "?";
}

FormulationKind parse_formulation(std::string_view name)
{
    for (auto kind : {FormulationKind::ExactVRep, FormulationKind::ReducedExact, FormulationKind::RelaxedQtilde,
                      FormulationKind::TheoreticalQ}) {
        if (formulation_name(kind) == name) {
            return kind;
        }
    }
    throw ParseError("unknown formulation '" + std::string(name) + "' (expected vrep, reduced, qtilde or q)");
}

std::string to_string(const VarKey& key)
{
    const auto pair = [&](const char* tag) {
        return std::string(tag) + "(" + std::to_string(key.first) + "," + std::to_string(key.second) + ")";
    };
    switch (key.kind) {
    case VarKind::ConvexWeight: return "mu(" + std::to_string(key.first) + ")";
    case VarKind::GTilde: return pair("gt");
    case VarKind::GBar: return pair("gb");
    case VarKind::P: return pair("p");
    case VarKind::CheckWord: return pair("w");
    case VarKind::EdgeMass: return pair("q");
    }
    return "?";
}

// ----------------------------------------------------------- LinearProgram

std::size_t LinearProgram::add_variable(VarKey key, Rational cost_coefficient)
{
    cost_coefficient.canonicalize();
    variables.push_back(key);
    cost.push_back(std::move(cost_coefficient));
    return variables.size() - 1;
}

void LinearProgram::add_constraint(std::vector<Term> terms, Rational rhs, std::string label)
{
    rhs.canonicalize();
    for (const auto& t : terms) {
        if (t.var >= variables.size()) {
            throw ValidationError("constraint '" + label + "' references an uncataloged variable");
        }
    }
    constraints.push_back({std::move(terms), std::move(rhs), std::move(label)});
}

Rational LinearProgram::objective(const LpPoint& point) const
{
    Rational total = 0;
    for (std::size_t k = 0; k < cost.size(); ++k) {
        if (!is_zero(cost[k]) && !is_zero(point.values.at(k))) {
            total += cost[k] * point.values[k];
        }
    }
    return total;
}

std::vector<std::string> LinearProgram::violations(const LpPoint& point) const
{
    if (point.values.size() != variables.size()) {
        return {"dimension mismatch: point has " + std::to_string(point.values.size()) + " coordinates, program has "
                + std::to_string(variables.size())};
    }
    std::vector<std::string> out;
    for (std::size_t k = 0; k < variables.size(); ++k) {
        if (sgn(point.values[k]) < 0) {
            out.push_back("nonnegativity " + to_string(variables[k]) + " = " + lprx::to_string(point.values[k]));
        }
    }
    for (const auto& row : constraints) {
        Rational lhs = 0;
        for (const auto& t : row.terms) {
            lhs += t.coeff * point.values[t.var];
        }
        if (lhs != row.rhs) {
            out.push_back(row.label + ": lhs " + lprx::to_string(lhs) + " != rhs " + lprx::to_string(row.rhs));
        }
    }
    return out;
}

// ------------------------------------------------------------------- costs

std::vector<std::vector<Rational>> rational_lambda(const FactorGraphModel& model)
{
    std::vector<std::vector<Rational>> out(model.num_variables());
    for (VariableId i : model.observed_variables()) {
        for (double l : model.evidence(i).log_weights()) {
            out[i].push_back(rational_from_double(l));
        }
    }
    return out;
}

std::vector<std::vector<Rational>> rational_lambda_tilde(const FactorGraphModel& model)
{
    auto lambda = rational_lambda(model);
    std::vector<std::vector<Rational>> out(model.num_variables());
    for (VariableId i : model.observed_variables()) {
        for (std::size_t a = 1; a < lambda[i].size(); ++a) {
            out[i].push_back(lambda[i][a] - lambda[i][0]);
        }
    }
    return out;
}

Rational rational_score(const FactorGraphModel& model, const Configuration& x)
{
    Rational total = 0;
    for (VariableId i : model.observed_variables()) {
        total += rational_from_double(model.evidence(i).log_weight(x.at(i)));
    }
    return total;
}

Rational reference_offset(const FactorGraphModel& model)
{
    Rational total = 0;
    for (VariableId i : model.observed_variables()) {
        total += rational_from_double(model.evidence(i).log_weight(0));
    }
    return total;
}

// ----------------------------------------------------------------- layouts

QtildeLayout::QtildeLayout(const FactorGraphModel& model)
{
    std::size_t next = 0;
    gtilde_offset.assign(model.num_variables(), npos);
    for (VariableId i : model.observed_variables()) {
        gtilde_offset[i] = next;
        next += model.alphabet(i).size() - 1;
    }
    for (FactorId j = 0; j < model.num_behaviours(); ++j) {
        p_offset.push_back(next);
        next += model.behaviour(j).allowed.size();
    }
    size = next;
}

std::size_t QtildeLayout::gtilde(VariableId i, SymbolIndex a) const
{
    if (gtilde_offset.at(i) == npos || a == 0) {
        throw ValidationError("no g~ coordinate for variable " + std::to_string(i) + ", symbol " + std::to_string(a));
    }
    return gtilde_offset[i] + a - 1;
}

QLayout::QLayout(const FactorGraphModel& model)
{
    std::size_t next = 0;
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        gbar_offset.push_back(next);
        next += model.alphabet(i).size();
    }
    for (FactorId j = 0; j < model.num_behaviours(); ++j) {
        p_offset.push_back(next);
        next += model.behaviour(j).allowed.size();
    }
    size = next;
}

namespace {

std::string row_label(const char* tag, std::initializer_list<std::pair<const char*, std::size_t>> fields)
{
    std::string s = tag;
    s += '[';
    bool first = true;
    for (const auto& [k, v] : fields) {
        if (!first) {
            s += ',';
        }
        first = false;
        s += k;
        s += '=';
        s += std::to_string(v);
    }
    s += ']';
    return s;
}

// Terms -p_{j,b} for every b in B_j whose entry for `variable` is `symbol`.
void append_marginal(std::vector<Term>& terms, const FactorGraphModel& model, FactorId j, VariableId variable,
                     SymbolIndex symbol, std::size_t p_offset, int coeff)
{
    const auto k = model.scope_position(j, variable);
    const auto& allowed = model.behaviour(j).allowed;
    for (std::size_t t = 0; t < allowed.size(); ++t) {
        if (allowed[t][k] == symbol) {
            terms.push_back({p_offset + t, coeff});
        }
    }
}

void require_nonempty(const std::vector<Configuration>& behaviour)
{
    if (behaviour.empty()) {
        throw ValidationError("no valid configuration: the global behaviour is empty");
    }
}

LinearProgram build_hull(const FactorGraphModel& model, const std::vector<Configuration>& behaviour, bool reduced)
{
    require_nonempty(behaviour);
    LinearProgram lp;
    lp.name = reduced ? "reduced" : "vrep";
    for (std::size_t k = 0; k < behaviour.size(); ++k) {
        lp.add_variable({VarKind::ConvexWeight, k, 0});
    }
    const auto lambda = rational_lambda(model);
    const auto lambda_tilde = rational_lambda_tilde(model);
    std::vector<std::size_t> offset(model.num_variables(), npos);
    for (VariableId i : model.observed_variables()) {
        offset[i] = lp.num_variables();
        for (SymbolIndex a = reduced ? 1 : 0; a < model.alphabet(i).size(); ++a) {
            if (reduced) {
                lp.add_variable({VarKind::GTilde, i, a}, lambda_tilde[i][a - 1]);
            } else {
                lp.add_variable({VarKind::GBar, i, a}, lambda[i][a]);
            }
        }
    }
    std::vector<Term> hull;
    for (std::size_t k = 0; k < behaviour.size(); ++k) {
        hull.push_back({k, 1});
    }
    lp.add_constraint(std::move(hull), 1, "hull");
    for (VariableId i : model.observed_variables()) {
        for (SymbolIndex a = reduced ? 1 : 0; a < model.alphabet(i).size(); ++a) {
            std::vector<Term> terms{{offset[i] + a - (reduced ? 1 : 0), 1}};
            for (std::size_t k = 0; k < behaviour.size(); ++k) {
                if (behaviour[k][i] == a) {
                    terms.push_back({k, -1});
                }
            }
            lp.add_constraint(std::move(terms), 0, row_label("link", {{"i", i}, {"a", a}}));
        }
    }
    return lp;
}

void add_p_block(LinearProgram& lp, const FactorGraphModel& model)
{
    for (FactorId j = 0; j < model.num_behaviours(); ++j) {
        for (std::size_t t = 0; t < model.behaviour(j).allowed.size(); ++t) {
            lp.add_variable({VarKind::P, j, t});
        }
    }
}

void add_normalization_rows(LinearProgram& lp, const FactorGraphModel& model, const std::vector<std::size_t>& p_offset)
{
    for (FactorId j = 0; j < model.num_behaviours(); ++j) {
        std::vector<Term> terms;
        for (std::size_t t = 0; t < model.behaviour(j).allowed.size(); ++t) {
            terms.push_back({p_offset[j] + t, 1});
        }
        lp.add_constraint(std::move(terms), 1, row_label("norm", {{"j", j}}));
    }
}

} // namespace

LinearProgram build_exact_vrep(const FactorGraphModel& model, const std::vector<Configuration>& behaviour)
{
    return build_hull(model, behaviour, false);
}

LinearProgram build_exact_vrep(const FactorGraphModel& model, std::uint64_t cap)
{
    return build_hull(model, global_behaviour(model, cap), false);
}

LinearProgram build_reduced_exact(const FactorGraphModel& model, const std::vector<Configuration>& behaviour)
{
    return build_hull(model, behaviour, true);
}

LinearProgram build_reduced_exact(const FactorGraphModel& model, std::uint64_t cap)
{
    return build_hull(model, global_behaviour(model, cap), true);
}

LinearProgram build_relaxed_qtilde(const FactorGraphModel& model)
{
    const QtildeLayout layout(model);
    const auto lambda_tilde = rational_lambda_tilde(model);
    LinearProgram lp;
    lp.name = "qtilde";
    for (VariableId i : model.observed_variables()) {
        for (SymbolIndex a = 1; a < model.alphabet(i).size(); ++a) {
            lp.add_variable({VarKind::GTilde, i, a}, lambda_tilde[i][a - 1]);
        }
    }
    add_p_block(lp, model);
    add_normalization_rows(lp, model, layout.p_offset);
    // Observed variables: g~ equals the marginal of every touching factor.
    for (VariableId i : model.observed_variables()) {
        for (FactorId j : model.factors_of(i)) {
            for (SymbolIndex a = 1; a < model.alphabet(i).size(); ++a) {
                std::vector<Term> terms{{layout.gtilde(i, a), 1}};
                append_marginal(terms, model, j, i, a, layout.p_offset[j], -1);
                lp.add_constraint(std::move(terms), 0, row_label("obs", {{"i", i}, {"j", j}, {"a", a}}));
            }
        }
    }
    // Hidden variables: every touching factor agrees with the anchor.
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        if (model.observed(i)) {
            continue;
        }
        const FactorId t = model.anchor(i);
        for (FactorId j : model.factors_of(i)) {
            if (j == t) {
                continue;
            }
            for (SymbolIndex a = 1; a < model.alphabet(i).size(); ++a) {
                std::vector<Term> terms;
                append_marginal(terms, model, j, i, a, layout.p_offset[j], 1);
                append_marginal(terms, model, t, i, a, layout.p_offset[t], -1);
                lp.add_constraint(std::move(terms), 0, row_label("hid", {{"i", i}, {"j", j}, {"a", a}}));
            }
        }
    }
    return lp;
}

LinearProgram build_theoretical_q(const FactorGraphModel& model)
{
    const QLayout layout(model);
    const auto lambda = rational_lambda(model);
    LinearProgram lp;
    lp.name = "q";
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        for (SymbolIndex a = 0; a < model.alphabet(i).size(); ++a) {
            lp.add_variable({VarKind::GBar, i, a}, model.observed(i) ? lambda[i][a] : Rational(0));
        }
    }
    add_p_block(lp, model);
    add_normalization_rows(lp, model, layout.p_offset);
    for (FactorId j = 0; j < model.num_behaviours(); ++j) {
        for (VariableId i : model.behaviour(j).scope) {
            for (SymbolIndex a = 0; a < model.alphabet(i).size(); ++a) {
                std::vector<Term> terms{{layout.gbar(i, a), 1}};
                append_marginal(terms, model, j, i, a, layout.p_offset[j], -1);
                lp.add_constraint(std::move(terms), 0, row_label("marg", {{"j", j}, {"i", i}, {"a", a}}));
            }
        }
    }
    return lp;
}

LinearProgram deduplicate_constraints(LinearProgram program)
{
    using Signature = std::pair<std::vector<std::pair<std::size_t, int>>, std::string>;
    std::map<Signature, bool> seen;
    std::vector<Constraint> kept;
    for (auto& row : program.constraints) {
        std::vector<std::pair<std::size_t, int>> terms;
        for (const auto& t : row.terms) {
            terms.emplace_back(t.var, t.coeff);
        }
        std::sort(terms.begin(), terms.end());
        if (seen.emplace(Signature{std::move(terms), to_string(row.rhs)}, true).second) {
            kept.push_back(std::move(row));
        }
    }
    program.constraints = std::move(kept);
    return program;
}

// -------------------------------------------------------------------- maps

BlockVector map_W(const FactorGraphModel& model, const BlockVector& gtilde)
{
    BlockVector g(model.num_variables());
    for (VariableId i : model.observed_variables()) {
        const auto n = model.alphabet(i).size();
        if (gtilde.at(i).size() != n - 1) {
            throw ValidationError("g~ block for variable '" + model.name(i) + "' has the wrong size");
        }
        Rational complement = 1;
        g[i].resize(n);
        for (SymbolIndex a = 1; a < n; ++a) {
            g[i][a] = gtilde[i][a - 1];
            complement -= gtilde[i][a - 1];
        }
        g[i][0] = complement;
    }
    return g;
}

BlockVector map_W_inverse(const FactorGraphModel& model, const BlockVector& g)
{
    BlockVector gtilde(model.num_variables());
    for (VariableId i : model.observed_variables()) {
        if (g.at(i).size() != model.alphabet(i).size()) {
            throw ValidationError("g block for variable '" + model.name(i) + "' has the wrong size");
        }
        gtilde[i].assign(g[i].begin() + 1, g[i].end());
    }
    return gtilde;
}

LpPoint map_V(const FactorGraphModel& model, const LpPoint& qtilde_point)
{
    const auto qtilde = build_relaxed_qtilde(model);
    if (auto bad = qtilde.violations(qtilde_point); !bad.empty()) {
        throw ValidationError("point is not in the relaxed polytope: " + bad.front());
    }
    const QtildeLayout from(model);
    const QLayout to(model);
    LpPoint out;
    out.values.resize(to.size);
    for (FactorId j = 0; j < model.num_behaviours(); ++j) {
        for (std::size_t t = 0; t < model.behaviour(j).allowed.size(); ++t) {
            out.values[to.p(j, t)] = qtilde_point.values[from.p(j, t)];
        }
    }
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        const auto n = model.alphabet(i).size();
        if (model.observed(i)) {
            Rational complement = 1;
            for (SymbolIndex a = 1; a < n; ++a) {
                out.values[to.gbar(i, a)] = qtilde_point.values[from.gtilde(i, a)];
                complement -= qtilde_point.values[from.gtilde(i, a)];
            }
            out.values[to.gbar(i, 0)] = complement;
        } else {
            const FactorId t = model.anchor(i);
            const auto k = model.scope_position(t, i);
            const auto& allowed = model.behaviour(t).allowed;
            for (std::size_t b = 0; b < allowed.size(); ++b) {
                out.values[to.gbar(i, allowed[b][k])] += qtilde_point.values[from.p(t, b)];
            }
        }
    }
    return out;
}

LpPoint map_V_inverse(const FactorGraphModel& model, const LpPoint& q_point)
{
    const QtildeLayout to(model);
    const QLayout from(model);
    if (q_point.values.size() != from.size) {
        throw ValidationError("point does not match the Q layout");
    }
    LpPoint out;
    out.values.resize(to.size);
    for (VariableId i : model.observed_variables()) {
        for (SymbolIndex a = 1; a < model.alphabet(i).size(); ++a) {
            out.values[to.gtilde(i, a)] = q_point.values[from.gbar(i, a)];
        }
    }
    for (FactorId j = 0; j < model.num_behaviours(); ++j) {
        for (std::size_t t = 0; t < model.behaviour(j).allowed.size(); ++t) {
            out.values[to.p(j, t)] = q_point.values[from.p(j, t)];
        }
    }
    return out;
}

namespace {

std::vector<std::size_t> local_indices(const FactorGraphModel& model, const Configuration& x)
{
    if (!model.is_valid(x)) {
        throw ValidationError("configuration is not in the global behaviour");
    }
    std::vector<std::size_t> chosen;
    for (FactorId j = 0; j < model.num_behaviours(); ++j) {
        const auto& beh = model.behaviour(j);
        Tuple local;
        for (VariableId v : beh.scope) {
            local.push_back(x[v]);
        }
        chosen.push_back(*beh.find(local));
    }
    return chosen;
}

} // namespace

LpPoint embed_configuration(const FactorGraphModel& model, const Configuration& x)
{
    const auto chosen = local_indices(model, x);
    const QLayout layout(model);
    LpPoint out;
    out.values.resize(layout.size);
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        out.values[layout.gbar(i, x[i])] = 1;
    }
    for (FactorId j = 0; j < chosen.size(); ++j) {
        out.values[layout.p(j, chosen[j])] = 1;
    }
    return out;
}

LpPoint embed_configuration_qtilde(const FactorGraphModel& model, const Configuration& x)
{
    const auto chosen = local_indices(model, x);
    const QtildeLayout layout(model);
    LpPoint out;
    out.values.resize(layout.size);
    for (VariableId i : model.observed_variables()) {
        if (x[i] != 0) {
            out.values[layout.gtilde(i, x[i])] = 1;
        }
    }
    for (FactorId j = 0; j < chosen.size(); ++j) {
        out.values[layout.p(j, chosen[j])] = 1;
    }
    return out;
}

// ----------------------------------------------------- derived constraints

DerivedReport verify_derived_constraints(const LinearProgram& program, const LpPoint& point)
{
    DerivedReport report;
    if (point.values.size() != program.num_variables()) {
        report.violations.push_back("dimension mismatch");
        return report;
    }
    // Per-block sums: (kind, first) -> sum.
    std::map<std::pair<VarKind, std::size_t>, Rational> sums;
    for (std::size_t k = 0; k < program.num_variables(); ++k) {
        const auto& key = program.variables[k];
        const auto& v = point.values[k];
        if (sgn(v) < 0 || v > 1) {
            report.violations.push_back(to_string(key) + " = " + to_string(v) + " outside [0,1]");
        }
        switch (key.kind) {
        case VarKind::GTilde:
        case VarKind::GBar:
        case VarKind::CheckWord:
        case VarKind::EdgeMass: sums[{key.kind, key.first}] += v; break;
        default: break;
        }
    }
    for (const auto& [block, sum] : sums) {
        const std::string where = to_string(VarKey{block.first, block.second, 0});
        const auto name = where.substr(0, where.find('(')) + "[" + std::to_string(block.second) + "]";
        if (block.first == VarKind::GTilde) {
            if (sum > 1) {
                report.violations.push_back("sum of " + name + " = " + to_string(sum) + " exceeds 1");
            }
        } else if (sum != 1) {
            report.violations.push_back("sum of " + name + " = " + to_string(sum) + " differs from 1");
        }
    }
    return report;
}

// -------------------------------------------------------------------- dump

std::string dump(const LinearProgram& program)
{
    std::ostringstream out;
    out << "program " << (program.name.empty() ? "lp" : program.name) << "\n";
    out << "vars " << program.num_variables() << ":";
    for (const auto& key : program.variables) {
        out << ' ' << to_string(key);
    }
    out << "\ncost:";
    for (std::size_t k = 0; k < program.num_variables(); ++k) {
        if (!is_zero(program.cost[k])) {
            out << ' ' << (sgn(program.cost[k]) > 0 ? "+" : "") << to_string(program.cost[k]) << ' '
                << to_string(program.variables[k]);
        }
    }
    out << '\n';
    for (const auto& row : program.constraints) {
        out << row.label << ':';
        for (const auto& t : row.terms) {
            out << ' ' << (t.coeff < 0 ? '-' : '+');
            if (t.coeff != 1 && t.coeff != -1) {
                out << (t.coeff < 0 ? -t.coeff : t.coeff) << '*';
            }
            out << to_string(program.variables[t.var]);
        }
        out << " = " << to_string(row.rhs) << '\n';
    }
    return out.str();
}

namespace {

VarKey parse_key(const std::string& token)
{
    const auto open = token.find('(');
    const auto close = token.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw ParseError("malformed variable name '" + token + "'");
    }
    const auto tag = token.substr(0, open);
    const auto inner = token.substr(open + 1, close - open - 1);
    const auto comma = inner.find(',');
    std::size_t first = 0;
    std::size_t second = 0;
    try {
        first = std::stoul(inner.substr(0, comma));
        if (comma != std::string::npos) {
            second = std::stoul(inner.substr(comma + 1));
        }
    } catch (const std::exception&) {
        throw ParseError("malformed variable name '" + token + "'");
    }
    static const std::map<std::string, VarKind> kinds{{"mu", VarKind::ConvexWeight}, {"gt", VarKind::GTilde},
                                                      {"gb", VarKind::GBar},         {"p", VarKind::P},
                                                      {"w", VarKind::CheckWord},     {"q", VarKind::EdgeMass}};
    auto it = kinds.find(tag);
    if (it == kinds.end()) {
        throw ParseError("unknown variable kind '" + tag + "'");
    }
    return {it->second, first, second};
}

} // namespace

LinearProgram parse_dump(std::string_view text)
{
    LinearProgram lp;
    std::map<std::string, std::size_t> index;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    const auto fail = [&](const std::string& what) {
        throw ParseError("dump line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream tokens(line);
        std::string head;
        tokens >> head;
        if (head == "program") {
            tokens >> lp.name;
        } else if (head == "vars") {
            std::string count;
            tokens >> count;
            std::string token;
            while (tokens >> token) {
                index.emplace(token, lp.add_variable(parse_key(token)));
            }
            if (count != std::to_string(lp.num_variables()) + ":") {
                fail("variable count does not match the listed variables");
            }
        } else if (head == "cost:") {
            std::string coeff;
            std::string name;
            while (tokens >> coeff >> name) {
                auto it = index.find(name);
                if (it == index.end()) {
                    fail("cost references unknown variable " + name);
                }
                lp.cost[it->second] = parse_rational(coeff);
            }
        } else {
            if (head.empty() || head.back() != ':') {
                fail("expected 'label:'");
            }
            std::vector<Term> terms;
            std::string token;
            while (tokens >> token && token != "=") {
                int sign = token[0] == '-' ? -1 : (token[0] == '+' ? 1 : 0);
                if (sign == 0) {
                    fail("term without sign: " + token);
                }
                std::string body = token.substr(1);
                int magnitude = 1;
                if (auto star = body.find('*'); star != std::string::npos) {
                    magnitude = std::stoi(body.substr(0, star));
                    body = body.substr(star + 1);
                }
                auto it = index.find(body);
                if (it == index.end()) {
                    fail("row references unknown variable " + body);
                }
                terms.push_back({it->second, sign * magnitude});
            }
            std::string rhs;
            if (token != "=" || !(tokens >> rhs)) {
                fail("missing right-hand side");
            }
            head.pop_back();
            lp.add_constraint(std::move(terms), parse_rational(rhs), head);
        }
    }
    return lp;
}

} // namespace lprx
