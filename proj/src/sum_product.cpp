#include "lprx/sum_product.hpp"

#include "lprx/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lprx {

void SpSettings::validate() const
{
    if (max_iterations < 1) {
        throw ValidationError("sum-product needs at least one iteration");
    }
    if (!(damping >= 0.0 && damping < 1.0)) {
        throw ValidationError("sum-product damping must lie in [0, 1)");
    }
    if (!(tolerance > 0.0)) {
        throw ValidationError("sum-product tolerance must be positive");
    }
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& v)
{
    const double top = *std::max_element(v.begin(), v.end());
    if (top == kNegInf) {
        return kNegInf;
    }
    double sum = 0.0;
    for (double x : v) {
        sum += std::exp(x - top);
    }
    return top + std::log(sum);
}

// Shift so the message sums to one in the probability domain.
void normalize_log(std::vector<double>& v)
{
    const double z = log_sum_exp(v);
    if (z == kNegInf) {
        throw ConstructionError("sum-product message vanished on every symbol");
    }
    for (double& x : v) {
        x -= z;
    }
}

std::vector<double> to_probabilities(std::vector<double> v)
{
    normalize_log(v);
    for (double& x : v) {
        x = std::exp(x);
    }
    return v;
}

} // namespace

SpOutput run_sum_product(const FactorGraphModel& model, const SpSettings& settings)
{
    settings.validate();
    const std::size_t n = model.num_variables();
    const std::size_t nf = model.num_behaviours();

    std::vector<std::vector<double>> prior(n);
    for (VariableId i = 0; i < n; ++i) {
        prior[i] = model.observed(i) ? model.evidence(i).log_weights()
                                     : std::vector<double>(model.alphabet(i).size(), 0.0);
    }

    // Messages per (factor, scope position).
    std::vector<std::vector<std::vector<double>>> to_factor(nf);
    std::vector<std::vector<std::vector<double>>> to_variable(nf);
    for (FactorId j = 0; j < nf; ++j) {
        const auto& scope = model.behaviour(j).scope;
        for (VariableId i : scope) {
            const std::size_t size = model.alphabet(i).size();
            const double uniform = -std::log(static_cast<double>(size));
            to_factor[j].emplace_back(size, uniform);
            to_variable[j].emplace_back(size, uniform);
        }
    }

    SpOutput out;
    std::vector<double> scratch;
    for (std::size_t it = 0; it < settings.max_iterations; ++it) {
        out.iterations = it + 1;
        for (VariableId i = 0; i < n; ++i) {
            for (FactorId j : model.factors_of(i)) {
                auto msg = prior[i];
                for (FactorId k : model.factors_of(i)) {
                    if (k == j) {
                        continue;
                    }
                    const auto& in = to_variable[k][model.scope_position(k, i)];
                    for (std::size_t a = 0; a < msg.size(); ++a) {
                        msg[a] += in[a];
                    }
                }
                normalize_log(msg);
                to_factor[j][model.scope_position(j, i)] = std::move(msg);
            }
        }
        double change = 0.0;
        for (FactorId j = 0; j < nf; ++j) {
            const auto& beh = model.behaviour(j);
            for (std::size_t pos = 0; pos < beh.scope.size(); ++pos) {
                const std::size_t size = model.alphabet(beh.scope[pos]).size();
                std::vector<std::vector<double>> terms(size);
                for (const auto& tuple : beh.allowed) {
                    double s = 0.0;
                    for (std::size_t q = 0; q < tuple.size(); ++q) {
                        if (q != pos) {
                            s += to_factor[j][q][tuple[q]];
                        }
                    }
                    terms[tuple[pos]].push_back(s);
                }
                std::vector<double> msg(size, kNegInf);
                for (std::size_t a = 0; a < size; ++a) {
                    if (!terms[a].empty()) {
                        msg[a] = log_sum_exp(terms[a]);
                    }
                }
                normalize_log(msg);
                auto& old = to_variable[j][pos];
                const auto old_p = to_probabilities(old);
                auto new_p = to_probabilities(msg);
                if (settings.damping > 0.0) {
                    for (std::size_t a = 0; a < size; ++a) {
                        new_p[a] = (1.0 - settings.damping) * new_p[a] + settings.damping * old_p[a];
                        msg[a] = new_p[a] > 0.0 ? std::log(new_p[a]) : kNegInf;
                    }
                }
                for (std::size_t a = 0; a < size; ++a) {
                    change = std::max(change, std::abs(new_p[a] - old_p[a]));
                }
                old = std::move(msg);
            }
        }
        if (change < settings.tolerance) {
            out.converged = true;
            break;
        }
    }

    out.beliefs.resize(n);
    out.decision.assign(n, 0);
    for (VariableId i = 0; i < n; ++i) {
        auto belief = prior[i];
        for (FactorId k : model.factors_of(i)) {
            const auto& in = to_variable[k][model.scope_position(k, i)];
            for (std::size_t a = 0; a < belief.size(); ++a) {
                belief[a] += in[a];
            }
        }
        out.beliefs[i] = to_probabilities(std::move(belief));
        const auto& b = out.beliefs[i];
        out.decision[i] = static_cast<SymbolIndex>(std::max_element(b.begin(), b.end()) - b.begin());
    }
    out.valid = model.is_valid(out.decision);
    return out;
}

SpOutput run_sum_product(const FactorGraphModel& model, std::vector<EvidenceTable> evidence,
                         const SpSettings& settings)
{
    return run_sum_product(model.with_evidence(std::move(evidence)), settings);
}

std::vector<std::vector<double>> brute_force_marginals(const FactorGraphModel& model, std::uint64_t cap)
{
    const auto behaviour = global_behaviour(model, cap);
    if (behaviour.empty()) {
        throw ValidationError("no valid configuration: the global behaviour is empty");
    }
    std::vector<double> scores;
    scores.reserve(behaviour.size());
    for (const auto& x : behaviour) {
        scores.push_back(log_score(model, x));
    }
    const double top = *std::max_element(scores.begin(), scores.end());
    std::vector<std::vector<double>> marginals(model.num_variables());
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        marginals[i].assign(model.alphabet(i).size(), 0.0);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < behaviour.size(); ++k) {
        const double w = std::exp(scores[k] - top);
        total += w;
        for (VariableId i = 0; i < model.num_variables(); ++i) {
            marginals[i][behaviour[k][i]] += w;
        }
    }
    for (auto& m : marginals) {
        for (double& v : m) {
            v /= total;
        }
    }
    return marginals;
}

} // namespace lprx
