#include "lprx/desk_models.hpp"
#include "lprx/receiver.hpp"
#include "vertex_oracle.hpp"

#include <doctest.h>

using namespace lprx;

namespace {

const FormulationKind kAll[] = {FormulationKind::ExactVRep, FormulationKind::ReducedExact,
                                FormulationKind::RelaxedQtilde, FormulationKind::TheoreticalQ};

} // namespace

TEST_CASE("repetition model decodes to its optimum in every formulation")
{
    const auto model = repetition_model();
    for (auto f : kAll) {
        const auto out = run_receiver(model, f);
        REQUIRE(out.kind == OutcomeKind::Configuration);
        CHECK(out.configuration == Configuration{1, 1});
        CHECK(out.certified_optimal);
        CHECK(certify_against_oracle(model, out));
        CHECK(out.objective == formulation_objective(model, f, {1, 1}));
    }
}

TEST_CASE("exclusion triangle fails at the all-half vertex")
{
    const auto model = exclusion_triangle({1, 1, 1});
    for (auto f : {FormulationKind::RelaxedQtilde, FormulationKind::TheoreticalQ}) {
        const auto out = run_receiver(model, f);
        REQUIRE(out.kind == OutcomeKind::Failure);
        CHECK_FALSE(out.certified_optimal);
        CHECK(out.configuration.empty());
        CHECK(out.objective == Rational(3, 2));
        CHECK(certify_against_oracle(model, out));
        CHECK_FALSE(failure_with_integral_optimum(model, out));
        for (const auto& v : out.point.values) {
            CHECK((v == 0 || v == Rational(1, 2)));
        }
    }
    for (auto f : {FormulationKind::ExactVRep, FormulationKind::ReducedExact}) {
        const auto out = run_receiver(model, f);
        REQUIRE(out.kind == OutcomeKind::Configuration);
        CHECK(out.objective == 1);
        CHECK(model.is_valid(out.configuration));
    }
}

TEST_CASE("equality triangle with mixed evidence stays integral")
{
    // integral objectives are 0 and 1; the Q polytope of the equality triangle
    // has no fractional vertex, so the relaxation decodes (1,1,1)
    const auto model = equality_triangle({1, 1, -1});
    const auto out = run_receiver(model, FormulationKind::TheoreticalQ);
    REQUIRE(out.kind == OutcomeKind::Configuration);
    CHECK(out.configuration == Configuration{1, 1, 1});
    for (const auto& v : oracle::vertices(build_theoretical_q(model))) {
        CHECK(is_integral(v));
    }
}

TEST_CASE("zero evidence yields a valid configuration or a failure")
{
    for (const auto& model : {exclusion_triangle(), equality_triangle(), chain_model(3, 3), hidden_chain_model()}) {
        for (auto f : kAll) {
            const auto out = run_receiver(model, f);
            CHECK(out.objective == 0);
            if (out.kind == OutcomeKind::Configuration) {
                CHECK(model.is_valid(out.configuration));
            }
        }
    }
}

TEST_CASE("hidden variables are recovered from the anchor factor")
{
    const auto base = hidden_chain_model();
    std::vector<EvidenceTable> ev{EvidenceTable::from_log_weights(0, {0.0, 0.5, 2.0}),
                                  EvidenceTable::from_log_weights(2, {0.0, -1.0, 0.3})};
    const auto model = base.with_evidence(ev);
    const auto expected = brute_force_optimum(model);
    for (auto f : kAll) {
        const auto out = run_receiver(model, f);
        REQUIRE(out.kind == OutcomeKind::Configuration);
        CHECK(out.configuration == expected);
    }
}

TEST_CASE("certificate check rejects a corrupted output")
{
    const auto model = repetition_model();
    auto out = run_receiver(model, FormulationKind::RelaxedQtilde);
    out.configuration = {0, 0};
    CHECK_FALSE(certify_against_oracle(model, out));
}

TEST_CASE("outcome names")
{
    CHECK(outcome_name(OutcomeKind::Configuration) == "configuration");
    CHECK(outcome_name(OutcomeKind::Failure) == "failure");
}
