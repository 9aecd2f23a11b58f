#include "lprx/desk_models.hpp"
#include "lprx/error.hpp"
#include "lprx/harness.hpp"
#include "lprx/model_io.hpp"

#include <doctest.h>

#include <sstream>

using namespace lprx;

namespace {

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

} // namespace

TEST_CASE("formatting")
{
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_configuration(repetition_model(), {1, 1}) == "(1,1)");
    CHECK(format_bits({1, 0, 1}) == "101");
    CHECK(parse_real_list("1.0,0.5") == std::vector<double>{1.0, 0.5});
    CHECK(parse_real_list("1 -2") == std::vector<double>{1.0, -2.0});
    CHECK_THROWS(parse_real_list("1,x"));
}

TEST_CASE("rendered receiver outputs")
{
    const auto rep = repetition_model();
    const auto ok = render_receiver_output(rep, run_receiver(rep, FormulationKind::RelaxedQtilde));
    CHECK(lines(ok).front() == "configuration (1,1)");

    const auto ex = exclusion_triangle({1, 1, 1});
    const auto fail = render_receiver_output(ex, run_receiver(ex, FormulationKind::TheoreticalQ));
    CHECK(lines(fail).front() == "failure");
    CHECK(fail.find("3/2") != std::string::npos);
    CHECK(fail.find("1/2") != std::string::npos);
}

TEST_CASE("compare runs")
{
    const auto model = random_tree_model(3, 6);
    const auto rows = compare_trials(model, 20, 42);
    REQUIRE(rows.size() == 20);
    for (const auto& r : rows) {
        if (r.lp_outcome == OutcomeKind::Configuration) {
            CHECK(r.oracle_agree);
        }
    }
    const auto csv = compare_csv(model, rows);
    const auto ls = lines(csv);
    CHECK(ls.size() == 21);
    CHECK(ls[0] ==
          "trial,seed,lp_outcome,lp_objective,lp_configuration,oracle_agree,sp_configuration,sp_converged,sp_valid,agree");
    CHECK(compare_csv(model, compare_trials(model, 20, 42, {.workers = 1})) == csv);
    CHECK_THROWS_AS(compare_trials(model, 0, 42), ValidationError);

    // every objective field parses back exactly
    for (std::size_t k = 0; k < rows.size(); ++k) {
        std::vector<std::string> cells;
        std::istringstream in(ls[k + 1]);
        for (std::string c; std::getline(in, c, ',');) {
            cells.push_back(c);
        }
        CHECK(parse_rational(cells[3]) == rows[k].lp_objective);
    }
}

TEST_CASE("adversarial triangle compare shows failures")
{
    const auto rows = compare_trials(exclusion_triangle({1, 1, 1}), 30, 5, {.noise = 0.3});
    std::size_t failures = 0;
    for (const auto& r : rows) {
        failures += r.lp_outcome == OutcomeKind::Failure;
    }
    CHECK(failures > 0);
}

TEST_CASE("simulation csv shape")
{
    const auto rows = simulate_error_rates(hamming_7_4(), {1.0, 0.5}, {3.0, 6.0}, 10, 1);
    const auto ls = lines(simulation_csv(rows));
    CHECK(ls.size() == 3);
    CHECK(ls[0] == "snr_db,trials,wer,ber,failure_rate,ml_cert_rate,sp_lp_agreement");
}

TEST_CASE("cover round trip report")
{
    const auto model = exclusion_triangle({1, 1, 1});
    const auto point = run_receiver(model, FormulationKind::TheoreticalQ).point;
    const auto rt = cover_round_trip(model, point);
    CHECK(rt.valid);
    CHECK(rt.round_trip_exact);
    CHECK(rt.lift.cover.degree == 2);
    const auto text = render_cover_round_trip(rt);
    CHECK(text.find("degree: 2") != std::string::npos);

    const auto integral = cover_round_trip(model, embed_configuration(model, {1, 0, 0}));
    CHECK(integral.lift.cover.degree == 1);
    CHECK(integral.round_trip_exact);
}

TEST_CASE("model description")
{
    const auto text = describe_model(hidden_chain_model());
    CHECK(text.find("injective") != std::string::npos);
}
