#include "lprx/desk_models.hpp"
#include "lprx/error.hpp"
#include "lprx/pseudo.hpp"
#include "lprx/random.hpp"
#include "lprx/receiver.hpp"
#include "lprx/simplex.hpp"

#include <doctest.h>

#include <json.hpp>

#include <set>

using namespace lprx;

namespace {

/// Factors 0 and 1 identity, factor 2 swaps the copies of x3: one 6-cycle.
GraphCover six_cycle(const FactorGraphModel& model)
{
    auto cover = identity_cover(model, 2);
    cover.permutations[2][1] = {1, 0};
    return cover;
}

LpPoint mix(const std::vector<LpPoint>& points, const std::vector<Rational>& weights)
{
    LpPoint z{std::vector<Rational>(points.front().values.size(), Rational(0))};
    for (std::size_t k = 0; k < points.size(); ++k) {
        for (std::size_t c = 0; c < z.values.size(); ++c) {
            z.values[c] += weights[k] * points[k].values[c];
        }
    }
    return z;
}

} // namespace

TEST_CASE("degree one cover is the base graph")
{
    const auto model = exclusion_triangle();
    const auto cover = identity_cover(model, 1);
    for (const auto& x : global_behaviour(model)) {
        CoverConfiguration labels;
        for (auto s : x) {
            labels.push_back({s});
        }
        CHECK(is_valid_cover_configuration(model, cover, labels));
        CHECK(cover_to_lp_point(model, cover, labels) == embed_configuration(model, x));
    }
    CHECK_FALSE(is_valid_cover_configuration(model, cover, {{1}, {1}, {0}}));
}

TEST_CASE("alternating labels on the six-cycle cover")
{
    const auto model = exclusion_triangle();
    const auto cover = six_cycle(model);
    CoverConfiguration labels{{0, 1}, {1, 0}, {0, 1}};
    CHECK(is_valid_cover_configuration(model, cover, labels));

    const auto z = cover_to_lp_point(model, cover, labels);
    const QLayout layout(model);
    for (VariableId i = 0; i < 3; ++i) {
        CHECK(z.values[layout.gbar(i, 0)] == Rational(1, 2));
        CHECK(z.values[layout.gbar(i, 1)] == Rational(1, 2));
    }
    for (FactorId j = 0; j < 3; ++j) {
        CHECK(z.values[layout.p(j, 0)] == 0);             // (0,0)
        CHECK(z.values[layout.p(j, 1)] == Rational(1, 2)); // (0,1)
        CHECK(z.values[layout.p(j, 2)] == Rational(1, 2)); // (1,0)
    }
    const auto pv = pseudoconfiguration_vector(model, labels);
    CHECK(pv.counts[0] == std::vector<std::size_t>{1, 1});

    CoverConfiguration flipped = labels;
    flipped[0][0] = 1;
    CHECK_FALSE(is_valid_cover_configuration(model, cover, flipped));
    CHECK_THROWS_AS(cover_to_lp_point(model, cover, flipped), ValidationError);
}

TEST_CASE("duplicated labels give the base configuration")
{
    const auto model = exclusion_triangle();
    const auto cover = six_cycle(model);
    CoverConfiguration labels{{0, 0}, {1, 1}, {0, 0}};
    REQUIRE(is_valid_cover_configuration(model, cover, labels));
    CHECK(cover_to_lp_point(model, cover, labels) == embed_configuration(model, {0, 1, 0}));
}

TEST_CASE("dimension and bijection checks")
{
    const auto model = exclusion_triangle();
    auto cover = identity_cover(model, 2);
    CHECK_THROWS_AS(is_valid_cover_configuration(model, cover, {{0}, {0}, {0}}), ValidationError);
    CHECK_THROWS_AS(is_valid_cover_configuration(model, cover, {{0, 2}, {0, 0}, {0, 0}}), ValidationError);
    cover.permutations[0][0] = {0, 0};
    CHECK_THROWS_AS(validate_cover(model, cover), ValidationError);
}

TEST_CASE("point to cover on integral points uses degree one")
{
    const auto model = hidden_chain_model();
    for (const auto& x : global_behaviour(model)) {
        const auto lift = lp_point_to_cover(model, embed_configuration(model, x));
        CHECK(lift.cover.degree == 1);
        for (VariableId i = 0; i < x.size(); ++i) {
            CHECK(lift.labels[i] == std::vector<SymbolIndex>{x[i]});
        }
    }
}

TEST_CASE("all-half point lifts to a degree two cover")
{
    const auto model = exclusion_triangle({1, 1, 1});
    const auto out = run_receiver(model, FormulationKind::TheoreticalQ).point;
    const auto lift = lp_point_to_cover(model, out);
    CHECK(lift.cover.degree == 2);
    CHECK(is_valid_cover_configuration(model, lift.cover, lift.labels));
    CHECK(cover_to_lp_point(model, lift.cover, lift.labels) == out);
}

TEST_CASE("denominators two and three give degree six")
{
    const auto model = chain_model(3, 3);
    const auto b = global_behaviour(model);
    const auto z = mix({embed_configuration(model, b[0]), embed_configuration(model, b[5]),
                        embed_configuration(model, b[11])},
                       {Rational(1, 2), Rational(1, 3), Rational(1, 6)});
    const auto lift = lp_point_to_cover(model, z);
    CHECK(lift.cover.degree == 6);
    CHECK(is_valid_cover_configuration(model, lift.cover, lift.labels));
    CHECK(cover_to_lp_point(model, lift.cover, lift.labels) == z);
}

TEST_CASE("infeasible points are rejected with the violated rows")
{
    const auto model = exclusion_triangle();
    auto z = embed_configuration(model, {0, 0, 0});
    z.values[0] = Rational(1, 2);
    try {
        lp_point_to_cover(model, z);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("marg") != std::string::npos);
    }
}

TEST_CASE("random covers of the exclusion triangle")
{
    const auto model = exclusion_triangle();
    // every vector over {0,1/2,1}^3 except those pairing a 1 with another nonzero entry
    std::set<std::vector<Rational>> allowed;
    const Rational vals[] = {Rational(0), Rational(1, 2), Rational(1)};
    for (const auto& a : vals) {
        for (const auto& b : vals) {
            for (const auto& c : vals) {
                const std::vector<Rational> v{a, b, c};
                const int ones = (a == 1) + (b == 1) + (c == 1);
                const int nonzero = (a != 0) + (b != 0) + (c != 0);
                if (ones == 0 || nonzero == 1) {
                    allowed.insert(v);
                }
            }
        }
    }
    REQUIRE(allowed.size() == 11);
    std::set<std::vector<Rational>> seen;
    const QLayout layout(model);
    const auto qq = build_theoretical_q(model);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto lift = random_cover_configuration(model, 2, seed);
        REQUIRE(lift.has_value());
        CHECK(is_valid_cover_configuration(model, lift->cover, lift->labels));
        const auto z = cover_to_lp_point(model, lift->cover, lift->labels);
        CHECK(qq.feasible(z));
        std::vector<Rational> g1{z.values[layout.gbar(0, 1)], z.values[layout.gbar(1, 1)], z.values[layout.gbar(2, 1)]};
        CHECK(allowed.count(g1) == 1);
        seen.insert(g1);
    }
    CHECK(seen.count({Rational(1, 2), Rational(1, 2), Rational(1, 2)}) == 1);
    CHECK(seen.count({Rational(0), Rational(0), Rational(0)}) == 1);
    CHECK(seen.size() >= 6);
}

TEST_CASE("random cover of degree one is a member of B")
{
    const auto model = chain_model(4, 3);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto lift = random_cover_configuration(model, 1, seed);
        REQUIRE(lift.has_value());
        Configuration x;
        for (const auto& l : lift->labels) {
            x.push_back(l[0]);
        }
        CHECK(model.is_valid(x));
    }
    const FactorGraphModel empty(std::vector<Alphabet>(2, Alphabet::binary()),
                                 {{{0, 1}, {{0, 0}}}, {{0, 1}, {{1, 1}}}},
                                 {EvidenceTable::from_weights(0, std::vector{1.0, 1.0})});
    CHECK_FALSE(random_cover_configuration(empty, 2, 1).has_value());
}

TEST_CASE("counting identity in lifted covers")
{
    Rng rng(9);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto model = randomize_evidence(random_tree_model(seed, 6), rng);
        const auto vertex = solve(build_theoretical_q(model)).point;
        const auto lift = lp_point_to_cover(model, vertex);
        const auto pv = pseudoconfiguration_vector(model, lift.labels);
        for (FactorId j = 0; j < model.num_behaviours(); ++j) {
            const auto& beh = model.behaviour(j);
            for (std::size_t k = 0; k < beh.scope.size(); ++k) {
                std::vector<std::size_t> tally(model.alphabet(beh.scope[k]).size(), 0);
                for (std::size_t l = 0; l < lift.cover.degree; ++l) {
                    ++tally[lift.labels[beh.scope[k]][lift.cover.permutations[j][k][l]]];
                }
                CHECK(tally == pv.counts[beh.scope[k]]);
            }
        }
    }
}

TEST_CASE("cover json")
{
    const auto model = exclusion_triangle();
    CoverLift lift{six_cycle(model), {{0, 1}, {1, 0}, {0, 1}}};
    const auto j = nlohmann::json::parse(cover_to_json(model, lift));
    CHECK(j["degree"] == 2);
    CHECK(j["labels"]["x1"] == nlohmann::json::array({"0", "1"}));
    CHECK(j["permutations"].size() == 6);
}
