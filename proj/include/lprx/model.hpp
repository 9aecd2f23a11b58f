#pragma once

// Factor-graph problem instances with indicator-function constraints and
// merged pendant evidence, plus exhaustive oracles over the global behaviour.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lprx {

using VariableId = std::size_t;
using FactorId = std::size_t;
using SymbolIndex = std::size_t;
using Tuple = std::vector<SymbolIndex>;
using Configuration = std::vector<SymbolIndex>;

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

/// Ordered, distinct symbol labels. Index 0 is the reference element.
class Alphabet {
public:
    explicit Alphabet(std::vector<std::string> symbols);

    static Alphabet binary();
    /// Symbols "0".."size-1".
    static Alphabet integers(std::size_t size);

    std::size_t size() const noexcept { return symbols_.size(); }
    const std::string& symbol(SymbolIndex index) const { return symbols_.at(index); }
    const std::vector<std::string>& symbols() const noexcept { return symbols_; }
    std::optional<SymbolIndex> index_of(std::string_view label) const;

private:
    std::vector<std::string> symbols_;
};

/// Indicator factor: the allowed local configurations over an ordered scope.
struct LocalBehaviour {
    std::vector<VariableId> scope;
    std::vector<Tuple> allowed;

    /// Position of `tuple` in `allowed`. Requires `allowed` sorted, which the
    /// model guarantees for every behaviour it owns.
    std::optional<std::size_t> find(std::span<const SymbolIndex> tuple) const;
};

/// Merged pendant evidence h_i for one observed variable, kept in both the
/// linear and the log domain.
class EvidenceTable {
public:
    /// Throws ValidationError unless every weight is finite and strictly positive.
    static EvidenceTable from_weights(VariableId variable, std::span<const double> weights);
    static EvidenceTable from_log_weights(VariableId variable, std::vector<double> log_weights);

    VariableId variable() const noexcept { return variable_; }
    std::size_t size() const noexcept { return log_weights_.size(); }
    double weight(SymbolIndex symbol) const { return weights_.at(symbol); }
    double log_weight(SymbolIndex symbol) const { return log_weights_.at(symbol); }
    const std::vector<double>& log_weights() const noexcept { return log_weights_; }

private:
    EvidenceTable(VariableId variable, std::vector<double> weights, std::vector<double> log_weights);

    VariableId variable_ = 0;
    std::vector<double> weights_;
    std::vector<double> log_weights_;
};

/// Immutable after construction. Construction validates the instance, sorts
/// every allowed list lexicographically and derives J_i and the anchors t_i.
class FactorGraphModel {
public:
    FactorGraphModel(std::vector<Alphabet> alphabets, std::vector<LocalBehaviour> behaviours,
                     std::vector<EvidenceTable> evidence, std::vector<std::string> names = {});

    std::size_t num_variables() const noexcept;
    std::size_t num_behaviours() const noexcept;

    const Alphabet& alphabet(VariableId variable) const;
    const std::string& name(VariableId variable) const;
    std::optional<VariableId> find_variable(std::string_view name) const;

    const LocalBehaviour& behaviour(FactorId factor) const;
    const std::vector<LocalBehaviour>& behaviours() const noexcept;
    /// Position of `variable` inside the scope of `factor`.
    std::size_t scope_position(FactorId factor, VariableId variable) const;

    /// Non-pendant factors touching the variable, ascending.
    std::span<const FactorId> factors_of(VariableId variable) const;
    /// Smallest factor touching the variable; every variable has one.
    FactorId anchor(VariableId variable) const;

    bool observed(VariableId variable) const;
    /// The evidence set Y, ascending.
    const std::vector<VariableId>& observed_variables() const noexcept { return observed_; }
    const EvidenceTable& evidence(VariableId variable) const;
    const std::vector<EvidenceTable>& evidence_tables() const noexcept { return evidence_; }

    /// Same structure, new evidence (revalidated against the structure).
    FactorGraphModel with_evidence(std::vector<EvidenceTable> evidence) const;

    bool satisfies(FactorId factor, const Configuration& x) const;
    /// True iff x is well-formed and lies in the global behaviour.
    bool is_valid(const Configuration& x) const;
    /// Throws ValidationError if x has the wrong length or an out-of-range symbol.
    void check_configuration(const Configuration& x) const;

private:
    struct Structure;

    FactorGraphModel(std::shared_ptr<const Structure> structure, std::vector<EvidenceTable> evidence);
    void attach_evidence();

    std::shared_ptr<const Structure> structure_;
    std::vector<EvidenceTable> evidence_;
    std::vector<VariableId> observed_;
    std::vector<std::ptrdiff_t> evidence_index_;
};

/// The global behaviour B in lexicographic order of symbol indices.
/// Throws CapExceededError when the configuration space exceeds `cap`.
std::vector<Configuration> global_behaviour(const FactorGraphModel& model,
                                            std::uint64_t cap = kDefaultEnumerationCap);

/// Product of h_i(x_i) over Y for valid x, zero otherwise.
double global_function_value(const FactorGraphModel& model, const Configuration& x);

/// Sum over Y of log h_i(x_i), ignoring validity.
double log_score(const FactorGraphModel& model, const Configuration& x);

/// Argmax of the log score over B, first in lexicographic order on ties.
/// Throws ValidationError when B is empty.
Configuration brute_force_optimum(const FactorGraphModel& model,
                                  std::uint64_t cap = kDefaultEnumerationCap);

/// True iff no two distinct members of B agree on every observed variable.
bool check_injectivity(const FactorGraphModel& model, std::uint64_t cap = kDefaultEnumerationCap);

/// Log-evidence vectors indexed by variable id; entries for unobserved
/// variables are empty. `lambda_tilde[i]` omits the reference symbol 0.
struct LogEvidence {
    std::vector<std::vector<double>> lambda;
    std::vector<std::vector<double>> lambda_tilde;
};

LogEvidence log_evidence_vectors(const FactorGraphModel& model);

/// Product of alphabet sizes, saturated at UINT64_MAX.
std::uint64_t configuration_space_size(const FactorGraphModel& model);

} // namespace lprx
