#include "lprx/pseudo.hpp"

#include "lprx/error.hpp"
#include "lprx/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>

namespace lprx {

namespace {

Permutation identity(std::size_t degree)
{
    Permutation p(degree);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return p;
}

void check_permutation(const Permutation& p, std::size_t degree, const std::string& what)
{
    if (p.size() != degree) {
        throw ValidationError(what + " has length " + std::to_string(p.size()) + ", expected "
                              + std::to_string(degree));
    }
    std::vector<bool> seen(degree, false);
    for (std::size_t v : p) {
        if (v >= degree || seen[v]) {
            throw ValidationError(what + " is not a bijection");
        }
        seen[v] = true;
    }
}

void check_labels(const FactorGraphModel& model, std::size_t degree, const CoverConfiguration& labels)
{
    if (labels.size() != model.num_variables()) {
        throw ValidationError("cover configuration has the wrong number of variables");
    }
    for (VariableId i = 0; i < labels.size(); ++i) {
        if (labels[i].size() != degree) {
            throw ValidationError("cover configuration of '" + model.name(i) + "' has the wrong number of copies");
        }
        for (SymbolIndex a : labels[i]) {
            if (a >= model.alphabet(i).size()) {
                throw ValidationError("cover configuration of '" + model.name(i) + "' has an out-of-range symbol");
            }
        }
    }
}

} // namespace

GraphCover identity_cover(const FactorGraphModel& model, std::size_t degree)
{
    if (degree == 0) {
        throw ValidationError("cover degree must be at least 1");
    }
    GraphCover cover;
    cover.degree = degree;
    for (const auto& beh : model.behaviours()) {
        cover.permutations.emplace_back(beh.scope.size(), identity(degree));
    }
    cover.pendant.assign(model.observed_variables().size(), identity(degree));
    return cover;
}

void validate_cover(const FactorGraphModel& model, const GraphCover& cover)
{
    if (cover.degree == 0) {
        throw ValidationError("cover degree must be at least 1");
    }
    if (cover.permutations.size() != model.num_behaviours()) {
        throw ValidationError("cover has the wrong number of factor classes");
    }
    for (FactorId j = 0; j < model.num_behaviours(); ++j) {
        const auto& scope = model.behaviour(j).scope;
        if (cover.permutations[j].size() != scope.size()) {
            throw ValidationError("cover factor " + std::to_string(j) + " has the wrong number of edge classes");
        }
        for (std::size_t k = 0; k < scope.size(); ++k) {
            check_permutation(cover.permutations[j][k], cover.degree,
                              "permutation (" + std::to_string(j) + ", " + model.name(scope[k]) + ")");
        }
    }
    if (cover.pendant.size() != model.observed_variables().size()) {
        throw ValidationError("cover has the wrong number of pendant classes");
    }
    for (const auto& p : cover.pendant) {
        check_permutation(p, cover.degree, "pendant permutation");
    }
}

bool is_valid_cover_configuration(const FactorGraphModel& model, const GraphCover& cover,
                                  const CoverConfiguration& labels)
{
    validate_cover(model, cover);
    check_labels(model, cover.degree, labels);
    Tuple local;
    for (FactorId j = 0; j < model.num_behaviours(); ++j) {
        const auto& beh = model.behaviour(j);
        local.resize(beh.scope.size());
        for (std::size_t l = 0; l < cover.degree; ++l) {
            for (std::size_t k = 0; k < beh.scope.size(); ++k) {
                local[k] = labels[beh.scope[k]][cover.permutations[j][k][l]];
            }
            if (!beh.find(local)) {
                return false;
            }
        }
    }
    return true;
}

PseudoconfigurationVector pseudoconfiguration_vector(const FactorGraphModel& model, const CoverConfiguration& labels)
{
    if (labels.empty() || labels.front().empty()) {
        throw ValidationError("cover configuration is empty");
    }
    const std::size_t degree = labels.front().size();
    check_labels(model, degree, labels);
    PseudoconfigurationVector v;
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        std::vector<std::size_t> counts(model.alphabet(i).size(), 0);
        for (SymbolIndex a : labels[i]) {
            ++counts[a];
        }
        std::vector<Rational> normalized;
        for (std::size_t c : counts) {
            Rational r(static_cast<unsigned long>(c), static_cast<unsigned long>(degree));
            r.canonicalize();
            normalized.push_back(r);
        }
        v.counts.push_back(std::move(counts));
        v.normalized.push_back(std::move(normalized));
    }
    return v;
}

LpPoint cover_to_lp_point(const FactorGraphModel& model, const GraphCover& cover, const CoverConfiguration& labels)
{
    if (!is_valid_cover_configuration(model, cover, labels)) {
        throw ValidationError("cover configuration is not valid on this cover");
    }
    const QLayout layout(model);
    LpPoint point;
    point.values.assign(layout.size, Rational(0));
    const Rational unit(1, static_cast<unsigned long>(cover.degree));
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        for (SymbolIndex a : labels[i]) {
            point.values[layout.gbar(i, a)] += unit;
        }
    }
    Tuple local;
    for (FactorId j = 0; j < model.num_behaviours(); ++j) {
        const auto& beh = model.behaviour(j);
        local.resize(beh.scope.size());
        for (std::size_t l = 0; l < cover.degree; ++l) {
            for (std::size_t k = 0; k < beh.scope.size(); ++k) {
                local[k] = labels[beh.scope[k]][cover.permutations[j][k][l]];
            }
            point.values[layout.p(j, *beh.find(local))] += unit;
        }
    }
    const auto program = build_theoretical_q(model);
    if (!program.feasible(point)) {
        throw ConstructionError("cover point is not in Q");
    }
    return point;
}

CoverLift lp_point_to_cover(const FactorGraphModel& model, const LpPoint& q_point)
{
    const auto program = build_theoretical_q(model);
    if (q_point.values.size() != program.num_variables()) {
        throw ValidationError("point does not match the Q catalog of this model");
    }
    if (const auto bad = program.violations(q_point); !bad.empty()) {
        std::string list;
        for (const auto& b : bad) {
            list += (list.empty() ? "" : ", ") + b;
        }
        throw ValidationError("point is not in Q; violated: " + list);
    }
    const QLayout layout(model);
    Integer degree = 1;
    for (FactorId j = 0; j < model.num_behaviours(); ++j) {
        for (std::size_t b = 0; b < model.behaviour(j).allowed.size(); ++b) {
            const Integer& den = q_point.values[layout.p(j, b)].get_den();
            mpz_lcm(degree.get_mpz_t(), degree.get_mpz_t(), den.get_mpz_t());
        }
    }
    if (!degree.fits_ulong_p() || degree > 1'000'000) {
        throw CapExceededError("cover degree " + degree.get_str() + " is too large to materialize");
    }
    const std::size_t M = degree.get_ui();
    const Rational scale(degree);
    auto count = [&](const Rational& value) -> std::size_t {
        const Rational c = value * scale;
        if (c.get_den() != 1) {
            throw ValidationError("a coordinate is not a multiple of 1/M");
        }
        return c.get_num().get_ui();
    };

    CoverLift lift;
    lift.cover = identity_cover(model, M);
    lift.labels.resize(model.num_variables());
    // copies_with[i][a]: ascending copy indices of variable i labelled a.
    std::vector<std::vector<std::vector<std::size_t>>> copies_with(model.num_variables());
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        copies_with[i].resize(model.alphabet(i).size());
        for (SymbolIndex a = 0; a < model.alphabet(i).size(); ++a) {
            for (std::size_t c = count(q_point.values[layout.gbar(i, a)]); c > 0; --c) {
                copies_with[i][a].push_back(lift.labels[i].size());
                lift.labels[i].push_back(a);
            }
        }
    }
    for (FactorId j = 0; j < model.num_behaviours(); ++j) {
        const auto& beh = model.behaviour(j);
        std::vector<const Tuple*> factor_copy;
        for (std::size_t b = 0; b < beh.allowed.size(); ++b) {
            for (std::size_t c = count(q_point.values[layout.p(j, b)]); c > 0; --c) {
                factor_copy.push_back(&beh.allowed[b]);
            }
        }
        for (std::size_t k = 0; k < beh.scope.size(); ++k) {
            const VariableId i = beh.scope[k];
            std::vector<std::size_t> next(model.alphabet(i).size(), 0);
            auto& perm = lift.cover.permutations[j][k];
            for (std::size_t l = 0; l < M; ++l) {
                const SymbolIndex a = (*factor_copy[l])[k];
                const auto& targets = copies_with[i][a];
                if (next[a] >= targets.size()) {
                    throw ConstructionError("class sizes differ while wiring the cover");
                }
                perm[l] = targets[next[a]++];
            }
        }
    }
    if (!is_valid_cover_configuration(model, lift.cover, lift.labels)) {
        throw ConstructionError("constructed cover configuration is invalid");
    }
    return lift;
}

namespace {

class CoverSearch {
public:
    CoverSearch(const FactorGraphModel& model, const GraphCover& cover, Rng& rng, std::size_t budget)
        : model_(model), cover_(cover), rng_(rng), budget_(budget)
    {
        const std::size_t M = cover.degree;
        labels_.assign(model.num_variables(), std::vector<SymbolIndex>(M, kUnset));
        // (factor, copy) pairs touching each (variable, copy).
        touching_.assign(model.num_variables(), std::vector<std::vector<std::pair<FactorId, std::size_t>>>(M));
        for (FactorId j = 0; j < model.num_behaviours(); ++j) {
            const auto& scope = model.behaviour(j).scope;
            for (std::size_t k = 0; k < scope.size(); ++k) {
                for (std::size_t l = 0; l < M; ++l) {
                    touching_[scope[k]][cover.permutations[j][k][l]].push_back({j, l});
                }
            }
        }
    }

    std::optional<CoverConfiguration> run()
    {
        if (assign(0, 0)) {
            return labels_;
        }
        return std::nullopt;
    }

private:
    static constexpr SymbolIndex kUnset = static_cast<SymbolIndex>(-1);

    // Some allowed tuple agrees with every assigned entry of factor copy (j, l).
    bool consistent(FactorId j, std::size_t l) const
    {
        const auto& beh = model_.behaviour(j);
        for (const auto& tuple : beh.allowed) {
            bool ok = true;
            for (std::size_t k = 0; k < tuple.size() && ok; ++k) {
                const SymbolIndex v = labels_[beh.scope[k]][cover_.permutations[j][k][l]];
                ok = v == kUnset || v == tuple[k];
            }
            if (ok) {
                return true;
            }
        }
        return false;
    }

    bool assign(VariableId i, std::size_t l)
    {
        if (i == labels_.size()) {
            return true;
        }
        if (nodes_++ >= budget_) {
            return false;
        }
        const VariableId ni = l + 1 == cover_.degree ? i + 1 : i;
        const std::size_t nl = l + 1 == cover_.degree ? 0 : l + 1;
        std::vector<SymbolIndex> order(model_.alphabet(i).size());
        std::iota(order.begin(), order.end(), SymbolIndex{0});
        rng_.shuffle(order.begin(), order.end());
        for (SymbolIndex a : order) {
            labels_[i][l] = a;
            const bool ok = std::all_of(touching_[i][l].begin(), touching_[i][l].end(),
                                        [this](const auto& fc) { return consistent(fc.first, fc.second); });
            if (ok && assign(ni, nl)) {
                return true;
            }
            if (nodes_ >= budget_) {
                break;
            }
        }
        labels_[i][l] = kUnset;
        return false;
    }

    const FactorGraphModel& model_;
    const GraphCover& cover_;
    Rng& rng_;
    std::size_t budget_;
    std::size_t nodes_ = 0;
    CoverConfiguration labels_;
    std::vector<std::vector<std::vector<std::pair<FactorId, std::size_t>>>> touching_;
};

} // namespace

std::optional<CoverLift> random_cover_configuration(const FactorGraphModel& model, std::size_t degree,
                                                    std::uint64_t seed, std::size_t node_budget)
{
    Rng rng(seed);
    CoverLift lift;
    lift.cover = identity_cover(model, degree);
    for (auto& per_factor : lift.cover.permutations) {
        for (auto& perm : per_factor) {
            rng.shuffle(perm.begin(), perm.end());
        }
    }
    CoverSearch search(model, lift.cover, rng, node_budget);
    auto labels = search.run();
    if (!labels) {
        return std::nullopt;
    }
    lift.labels = std::move(*labels);
    return lift;
}

std::string cover_to_json(const FactorGraphModel& model, const CoverLift& lift)
{
    using oj = nlohmann::ordered_json;
    oj doc;
    doc["degree"] = lift.cover.degree;
    oj perms = oj::array();
    for (FactorId j = 0; j < model.num_behaviours(); ++j) {
        const auto& scope = model.behaviour(j).scope;
        for (std::size_t k = 0; k < scope.size(); ++k) {
            perms.push_back({{"factor", j}, {"variable", model.name(scope[k])}, {"perm", lift.cover.permutations[j][k]}});
        }
    }
    doc["permutations"] = std::move(perms);
    oj pendant = oj::array();
    for (std::size_t y = 0; y < lift.cover.pendant.size(); ++y) {
        pendant.push_back({{"variable", model.name(model.observed_variables()[y])}, {"perm", lift.cover.pendant[y]}});
    }
    doc["pendant"] = std::move(pendant);
    oj labels = oj::object();
    for (VariableId i = 0; i < model.num_variables(); ++i) {
        oj row = oj::array();
        for (SymbolIndex a : lift.labels[i]) {
            row.push_back(model.alphabet(i).symbol(a));
        }
        labels[model.name(i)] = std::move(row);
    }
    doc["labels"] = std::move(labels);
    return doc.dump(2) + "\n";
}

} // namespace lprx
