#include "lprx/desk_models.hpp"

#include "lprx/error.hpp"

#include <algorithm>
#include <set>

namespace lprx {

namespace {

std::vector<EvidenceTable> binary_log_evidence(const std::vector<double>& lambda_tilde)
{
    std::vector<EvidenceTable> evidence;
    for (std::size_t i = 0; i < lambda_tilde.size(); ++i) {
        evidence.push_back(EvidenceTable::from_log_weights(i, {0.0, lambda_tilde[i]}));
    }
    return evidence;
}

FactorGraphModel binary_triangle(std::vector<Tuple> allowed, const std::vector<double>& lambda_tilde)
{
    if (lambda_tilde.size() != 3) {
        throw ValidationError("the triangle models take three evidence values");
    }
    std::vector<LocalBehaviour> behaviours{{{0, 1}, allowed}, {{1, 2}, allowed}, {{0, 2}, allowed}};
    return FactorGraphModel(std::vector<Alphabet>(3, Alphabet::binary()), std::move(behaviours),
                            binary_log_evidence(lambda_tilde), {"x1", "x2", "x3"});
}

} // namespace

FactorGraphModel repetition_model(std::vector<double> h1, std::vector<double> h2)
{
    std::vector<EvidenceTable> evidence{EvidenceTable::from_weights(0, h1), EvidenceTable::from_weights(1, h2)};
    return FactorGraphModel(std::vector<Alphabet>(2, Alphabet::binary()), {{{0, 1}, {{0, 0}, {1, 1}}}},
                            std::move(evidence), {"x1", "x2"});
}

FactorGraphModel equality_triangle(std::vector<double> lambda_tilde)
{
    return binary_triangle({{0, 0}, {1, 1}}, lambda_tilde);
}

FactorGraphModel exclusion_triangle(std::vector<double> lambda_tilde)
{
    return binary_triangle({{0, 0}, {0, 1}, {1, 0}}, lambda_tilde);
}

FactorGraphModel chain_model(std::size_t length, std::size_t alphabet)
{
    if (length < 2 || alphabet < 2) {
        throw ValidationError("chain needs at least two variables and two symbols");
    }
    std::vector<Tuple> allowed;
    for (std::size_t a = 0; a < alphabet; ++a) {
        for (std::size_t b = 0; b < alphabet; ++b) {
            if (b != (a + 1) % alphabet) {
                allowed.push_back({a, b});
            }
        }
    }
    std::vector<LocalBehaviour> behaviours;
    std::vector<EvidenceTable> evidence;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < length; ++i) {
        if (i + 1 < length) {
            behaviours.push_back({{i, i + 1}, allowed});
        }
        evidence.push_back(EvidenceTable::from_log_weights(i, std::vector<double>(alphabet, 0.0)));
        names.push_back("x" + std::to_string(i));
    }
    return FactorGraphModel(std::vector<Alphabet>(length, Alphabet::integers(alphabet)), std::move(behaviours),
                            std::move(evidence), std::move(names));
}

FactorGraphModel hidden_chain_model()
{
    std::vector<Alphabet> alphabets{Alphabet::integers(3), Alphabet::binary(), Alphabet::integers(3)};
    std::vector<LocalBehaviour> behaviours{
        {{0, 1}, {{0, 0}, {1, 1}, {2, 1}}},
        {{1, 2}, {{0, 0}, {0, 1}, {1, 1}, {1, 2}}},
    };
    std::vector<EvidenceTable> evidence{EvidenceTable::from_log_weights(0, {0.0, 0.0, 0.0}),
                                        EvidenceTable::from_log_weights(2, {0.0, 0.0, 0.0})};
    return FactorGraphModel(std::move(alphabets), std::move(behaviours), std::move(evidence), {"x0", "x1", "x2"});
}

FactorGraphModel random_tree_model(std::uint64_t seed, std::size_t max_variables)
{
    if (max_variables < 2) {
        throw ValidationError("a tree model needs at least two variables");
    }
    Rng rng(seed);
    const std::size_t n = 2 + rng.index(max_variables - 1);
    std::vector<Alphabet> alphabets;
    for (std::size_t i = 0; i < n; ++i) {
        alphabets.push_back(Alphabet::integers(2 + rng.index(2)));
    }
    // Each new factor joins one earlier variable with one or two new ones.
    std::vector<std::vector<VariableId>> scopes;
    for (std::size_t v = 1; v < n;) {
        const VariableId parent = rng.index(v);
        if (v + 1 < n && rng.index(4) == 0) {
            scopes.push_back({parent, v, v + 1});
            v += 2;
        } else {
            scopes.push_back({parent, v});
            v += 1;
        }
    }
    std::vector<LocalBehaviour> behaviours;
    for (auto& scope : scopes) {
        std::vector<Tuple> all;
        Tuple t(scope.size(), 0);
        for (;;) {
            all.push_back(t);
            std::size_t k = t.size();
            while (k > 0 && ++t[k - 1] == alphabets[scope[k - 1]].size()) {
                t[k - 1] = 0;
                --k;
            }
            if (k == 0) {
                break;
            }
        }
        std::set<Tuple> keep;
        for (const auto& tuple : all) {
            if (rng.uniform() < 0.6) {
                keep.insert(tuple);
            }
        }
        // Every symbol must appear at every position.
        for (std::size_t pos = 0; pos < scope.size(); ++pos) {
            for (SymbolIndex a = 0; a < alphabets[scope[pos]].size(); ++a) {
                const bool covered = std::any_of(keep.begin(), keep.end(), [&](const Tuple& u) { return u[pos] == a; });
                if (!covered) {
                    std::vector<Tuple> candidates;
                    for (const auto& u : all) {
                        if (u[pos] == a) {
                            candidates.push_back(u);
                        }
                    }
                    keep.insert(candidates[rng.index(candidates.size())]);
                }
            }
        }
        behaviours.push_back({scope, {keep.begin(), keep.end()}});
    }
    std::vector<EvidenceTable> evidence;
    for (VariableId i = 0; i < n; ++i) {
        if (rng.uniform() < 0.7 || (i + 1 == n && evidence.empty())) {
            std::vector<double> logs(alphabets[i].size());
            for (double& l : logs) {
                l = rng.normal();
            }
            evidence.push_back(EvidenceTable::from_log_weights(i, std::move(logs)));
        }
    }
    return FactorGraphModel(std::move(alphabets), std::move(behaviours), std::move(evidence));
}

FactorGraphModel randomize_evidence(const FactorGraphModel& model, Rng& rng, double scale)
{
    std::vector<EvidenceTable> evidence;
    for (const auto& e : model.evidence_tables()) {
        std::vector<double> logs(e.size());
        for (double& l : logs) {
            l = scale * rng.normal();
        }
        evidence.push_back(EvidenceTable::from_log_weights(e.variable(), std::move(logs)));
    }
    return model.with_evidence(std::move(evidence));
}

std::vector<std::vector<double>> bpsk_log_weights(const std::vector<double>& received, double sigma2)
{
    if (!(sigma2 > 0.0)) {
        throw ValidationError("noise variance must be positive");
    }
    std::vector<std::vector<double>> out;
    out.reserve(received.size());
    for (double y : received) {
        out.push_back({-(y - 1.0) * (y - 1.0) / sigma2, -(y + 1.0) * (y + 1.0) / sigma2});
    }
    return out;
}

} // namespace lprx
