#include "lprx/model.hpp"

#include "lprx/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace lprx {

// ---------------------------------------------------------------- Alphabet

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols))
{
    if (symbols_.size() < 2) {
        throw ValidationError("an alphabet needs at least two symbols");
    }
    std::set<std::string> seen(symbols_.begin(), symbols_.end());
    if (seen.size() != symbols_.size()) {
        throw ValidationError("alphabet symbols must be distinct");
    }
}

Alphabet Alphabet::binary() { return Alphabet({"0", "1"}); }

Alphabet Alphabet::integers(std::size_t size)
{
    std::vector<std::string> symbols;
    for (std::size_t k = 0; k < size; ++k) {
        symbols.push_back(std::to_string(k));
    }
    return Alphabet(std::move(symbols));
}

std::optional<SymbolIndex> Alphabet::index_of(std::string_view label) const
{
    for (SymbolIndex k = 0; k < symbols_.size(); ++k) {
        if (symbols_[k] == label) {
            return k;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------- LocalBehaviour

std::optional<std::size_t> LocalBehaviour::find(std::span<const SymbolIndex> tuple) const
{
    auto it = std::lower_bound(allowed.begin(), allowed.end(), tuple,
                               [](const Tuple& a, std::span<const SymbolIndex> b) {
                                   return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
                               });
    if (it != allowed.end() && std::equal(it->begin(), it->end(), tuple.begin(), tuple.end())) {
        return static_cast<std::size_t>(it - allowed.begin());
    }
    return std::nullopt;
}

// ----------------------------------------------------------- EvidenceTable

EvidenceTable::EvidenceTable(VariableId variable, std::vector<double> weights, std::vector<double> log_weights)
    : variable_(variable), weights_(std::move(weights)), log_weights_(std::move(log_weights))
{
}

EvidenceTable EvidenceTable::from_weights(VariableId variable, std::span<const double> weights)
{
    std::vector<double> logs;
    logs.reserve(weights.size());
    for (double w : weights) {
        if (!std::isfinite(w) || !(w > 0.0)) {
            throw ValidationError("evidence weights must be finite and strictly positive (variable "
                                  + std::to_string(variable) + ")");
        }
        logs.push_back(std::log(w));
    }
    return EvidenceTable(variable, std::vector<double>(weights.begin(), weights.end()), std::move(logs));
}

EvidenceTable EvidenceTable::from_log_weights(VariableId variable, std::vector<double> log_weights)
{
    std::vector<double> weights;
    weights.reserve(log_weights.size());
    for (double l : log_weights) {
        if (!std::isfinite(l)) {
            throw ValidationError("log evidence must be finite (variable " + std::to_string(variable) + ")");
        }
        weights.push_back(std::exp(l));
    }
    return EvidenceTable(variable, std::move(weights), std::move(log_weights));
}

// -------------------------------------------------------- FactorGraphModel

struct FactorGraphModel::Structure {
    std::vector<Alphabet> alphabets;
    std::vector<LocalBehaviour> behaviours;
    std::vector<std::string> names;
    std::vector<std::vector<FactorId>> factors_of;
    // Per factor: variable id -> position in scope.
    std::vector<std::map<VariableId, std::size_t>> positions;
};

FactorGraphModel::FactorGraphModel(std::vector<Alphabet> alphabets, std::vector<LocalBehaviour> behaviours,
                                   std::vector<EvidenceTable> evidence, std::vector<std::string> names)
{
    auto s = std::make_shared<Structure>();
    const std::size_t n = alphabets.size();
    if (n == 0) {
        throw ValidationError("a model needs at least one variable");
    }
    if (names.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            names.push_back(std::to_string(i));
        }
    }
    if (names.size() != n) {
        throw ValidationError("variable name count does not match variable count");
    }
    if (std::set<std::string>(names.begin(), names.end()).size() != n) {
        throw ValidationError("variable names must be distinct");
    }
    s->factors_of.resize(n);
    for (FactorId j = 0; j < behaviours.size(); ++j) {
        auto& beh = behaviours[j];
        const std::string where = "behaviour " + std::to_string(j);
        if (beh.scope.size() < 2) {
            throw ValidationError(where + ": scope must touch at least two variables "
                                          "(single-variable factors belong in the evidence)");
        }
        std::map<VariableId, std::size_t> pos;
        for (std::size_t k = 0; k < beh.scope.size(); ++k) {
            if (beh.scope[k] >= n) {
                throw ValidationError(where + ": scope references unknown variable " + std::to_string(beh.scope[k]));
            }
            if (!pos.emplace(beh.scope[k], k).second) {
                throw ValidationError(where + ": variable repeated in scope");
            }
        }
        if (beh.allowed.empty()) {
            throw ValidationError(where + ": allowed set is empty");
        }
        for (const auto& t : beh.allowed) {
            if (t.size() != beh.scope.size()) {
                throw ValidationError(where + ": tuple arity differs from scope size");
            }
            for (std::size_t k = 0; k < t.size(); ++k) {
                if (t[k] >= alphabets[beh.scope[k]].size()) {
                    throw ValidationError(where + ": tuple symbol outside the alphabet");
                }
            }
        }
        std::sort(beh.allowed.begin(), beh.allowed.end());
        if (std::adjacent_find(beh.allowed.begin(), beh.allowed.end()) != beh.allowed.end()) {
            throw ValidationError(where + ": duplicate tuple in allowed set");
        }
        for (VariableId v : beh.scope) {
            s->factors_of[v].push_back(j);
        }
        s->positions.push_back(std::move(pos));
    }
    for (VariableId i = 0; i < n; ++i) {
        if (s->factors_of[i].empty()) {
            throw ValidationError("variable '" + names[i] + "' touches no behaviour");
        }
    }
    s->alphabets = std::move(alphabets);
    s->behaviours = std::move(behaviours);
    s->names = std::move(names);
    structure_ = std::move(s);
    evidence_ = std::move(evidence);
    attach_evidence();
}

FactorGraphModel::FactorGraphModel(std::shared_ptr<const Structure> structure, std::vector<EvidenceTable> evidence)
    : structure_(std::move(structure)), evidence_(std::move(evidence))
{
    attach_evidence();
}

void FactorGraphModel::attach_evidence()
{
    const std::size_t n = structure_->alphabets.size();
    evidence_index_.assign(n, -1);
    std::sort(evidence_.begin(), evidence_.end(),
              [](const EvidenceTable& a, const EvidenceTable& b) { return a.variable() < b.variable(); });
    for (std::size_t k = 0; k < evidence_.size(); ++k) {
        const auto& e = evidence_[k];
        if (e.variable() >= n) {
            throw ValidationError("evidence references unknown variable " + std::to_string(e.variable()));
        }
        if (evidence_index_[e.variable()] >= 0) {
            throw ValidationError("duplicate evidence for variable '" + structure_->names[e.variable()]
                                  + "' (merge pendant factors first)");
        }
        if (e.size() != structure_->alphabets[e.variable()].size()) {
            throw ValidationError("evidence for variable '" + structure_->names[e.variable()]
                                  + "' does not cover its alphabet");
        }
        evidence_index_[e.variable()] = static_cast<std::ptrdiff_t>(k);
    }
    if (evidence_.empty()) {
        throw ValidationError("a model needs at least one observed variable");
    }
    observed_.clear();
    for (const auto& e : evidence_) {
        observed_.push_back(e.variable());
    }
}

std::size_t FactorGraphModel::num_variables() const noexcept { return structure_->alphabets.size(); }
std::size_t FactorGraphModel::num_behaviours() const noexcept { return structure_->behaviours.size(); }

const Alphabet& FactorGraphModel::alphabet(VariableId variable) const { return structure_->alphabets.at(variable); }
const std::string& FactorGraphModel::name(VariableId variable) const { return structure_->names.at(variable); }

std::optional<VariableId> FactorGraphModel::find_variable(std::string_view name) const
{
    const auto& names = structure_->names;
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        return std::nullopt;
    }
    return static_cast<VariableId>(it - names.begin());
}

const LocalBehaviour& FactorGraphModel::behaviour(FactorId factor) const { return structure_->behaviours.at(factor); }
const std::vector<LocalBehaviour>& FactorGraphModel::behaviours() const noexcept { return structure_->behaviours; }

std::size_t FactorGraphModel::scope_position(FactorId factor, VariableId variable) const
{
    const auto& pos = structure_->positions.at(factor);
    auto it = pos.find(variable);
    if (it == pos.end()) {
        throw ValidationError("variable " + std::to_string(variable) + " is not in the scope of behaviour "
                              + std::to_string(factor));
    }
    return it->second;
}

std::span<const FactorId> FactorGraphModel::factors_of(VariableId variable) const
{
    return structure_->factors_of.at(variable);
}

FactorId FactorGraphModel::anchor(VariableId variable) const { return structure_->factors_of.at(variable).front(); }

bool FactorGraphModel::observed(VariableId variable) const { return evidence_index_.at(variable) >= 0; }

const EvidenceTable& FactorGraphModel::evidence(VariableId variable) const
{
    const auto k = evidence_index_.at(variable);
    if (k < 0) {
        throw ValidationError("variable '" + name(variable) + "' carries no evidence");
    }
    return evidence_[static_cast<std::size_t>(k)];
}

FactorGraphModel FactorGraphModel::with_evidence(std::vector<EvidenceTable> evidence) const
{
    return FactorGraphModel(structure_, std::move(evidence));
}

bool FactorGraphModel::satisfies(FactorId factor, const Configuration& x) const
{
    const auto& beh = behaviour(factor);
    Tuple local(beh.scope.size());
    for (std::size_t k = 0; k < beh.scope.size(); ++k) {
        local[k] = x[beh.scope[k]];
    }
    return beh.find(local).has_value();
}

void FactorGraphModel::check_configuration(const Configuration& x) const
{
    if (x.size() != num_variables()) {
        throw ValidationError("configuration has " + std::to_string(x.size()) + " entries, model has "
                              + std::to_string(num_variables()) + " variables");
    }
    for (VariableId i = 0; i < x.size(); ++i) {
        if (x[i] >= alphabet(i).size()) {
            throw ValidationError("configuration symbol out of range at variable '" + name(i) + "'");
        }
    }
}

bool FactorGraphModel::is_valid(const Configuration& x) const
{
    check_configuration(x);
    for (FactorId j = 0; j < num_behaviours(); ++j) {
        if (!satisfies(j, x)) {
            return false;
        }
    }
    return true;
}

// ----------------------------------------------------------------- oracles

std::uint64_t configuration_space_size(const FactorGraphModel& model)
{
    std::uint64_t total = 1;
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        const std::uint64_t n = model.alphabet(i).size();
        if (total > std::numeric_limits<std::uint64_t>::max() / n) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        total *= n;
    }
    return total;
}

namespace {

// Depth-first enumeration in lexicographic order; each behaviour is checked
// as soon as its last scope variable is assigned.
class BehaviourEnumerator {
public:
    explicit BehaviourEnumerator(const FactorGraphModel& model) : model_(model), ready_(model.num_variables())
    {
        for (FactorId j = 0; j < model.num_behaviours(); ++j) {
            const auto& scope = model.behaviour(j).scope;
            ready_[*std::max_element(scope.begin(), scope.end())].push_back(j);
        }
    }

    template <class Visit>
    void run(Visit&& visit)
    {
        Configuration x(model_.num_variables(), 0);
        descend(0, x, visit);
    }

private:
    template <class Visit>
    void descend(VariableId i, Configuration& x, Visit& visit)
    {
        if (i == x.size()) {
            visit(x);
            return;
        }
        for (SymbolIndex a = 0; a < model_.alphabet(i).size(); ++a) {
            x[i] = a;
            bool ok = true;
            for (FactorId j : ready_[i]) {
                if (!model_.satisfies(j, x)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                descend(i + 1, x, visit);
            }
        }
    }

    const FactorGraphModel& model_;
    std::vector<std::vector<FactorId>> ready_;
};

void check_cap(const FactorGraphModel& model, std::uint64_t cap)
{
    if (configuration_space_size(model) > cap) {
        throw CapExceededError("instance too large for enumeration (configuration space exceeds cap "
                               + std::to_string(cap) + ")");
    }
}

} // namespace

std::vector<Configuration> global_behaviour(const FactorGraphModel& model, std::uint64_t cap)
{
    check_cap(model, cap);
    std::vector<Configuration> out;
    BehaviourEnumerator(model).run([&](const Configuration& x) { out.push_back(x); });
    return out;
}

double log_score(const FactorGraphModel& model, const Configuration& x)
{
    double total = 0.0;
    for (VariableId i : model.observed_variables()) {
        total += model.evidence(i).log_weight(x.at(i));
    }
    return total;
}

double global_function_value(const FactorGraphModel& model, const Configuration& x)
{
    if (!model.is_valid(x)) {
        return 0.0;
    }
    double product = 1.0;
    for (VariableId i : model.observed_variables()) {
        product *= model.evidence(i).weight(x[i]);
    }
    return product;
}

Configuration brute_force_optimum(const FactorGraphModel& model, std::uint64_t cap)
{
    check_cap(model, cap);
    std::optional<Configuration> best;
    double best_score = 0.0;
    BehaviourEnumerator(model).run([&](const Configuration& x) {
        const double s = log_score(model, x);
        if (!best || s > best_score) {
            best = x;
            best_score = s;
        }
    });
    if (!best) {
        throw ValidationError("no valid configuration: the global behaviour is empty");
    }
    return *best;
}

bool check_injectivity(const FactorGraphModel& model, std::uint64_t cap)
{
    std::set<Configuration> projections;
    bool injective = true;
    const auto& y = model.observed_variables();
    for (const auto& x : global_behaviour(model, cap)) {
        Configuration proj;
        proj.reserve(y.size());
        for (VariableId i : y) {
            proj.push_back(x[i]);
        }
        if (!projections.insert(std::move(proj)).second) {
            injective = false;
            break;
        }
    }
    return injective;
}

LogEvidence log_evidence_vectors(const FactorGraphModel& model)
{
    LogEvidence out;
    out.lambda.resize(model.num_variables());
    out.lambda_tilde.resize(model.num_variables());
    for (VariableId i : model.observed_variables()) {
        const auto& logs = model.evidence(i).log_weights();
        out.lambda[i] = logs;
        for (std::size_t a = 1; a < logs.size(); ++a) {
            out.lambda_tilde[i].push_back(logs[a] - logs[0]);
        }
    }
    return out;
}

} // namespace lprx
