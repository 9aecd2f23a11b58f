#pragma once

// Experiment orchestration behind the command-line tool: rendering of
// receiver outputs, per-trial comparison runs, cover round trips and CSV
// formatting. Data rows never contain timing, so reruns are byte-identical.

#include "lprx/equalizer.hpp"
#include "lprx/pseudo.hpp"
#include "lprx/receiver.hpp"
#include "lprx/sum_product.hpp"

#include <string>
#include <vector>

namespace lprx {

/// Exit codes of the command-line tool.
inline constexpr int kExitConfiguration = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFailure = 2;

/// printf %.17g, so the value parses back exactly.
std::string format_double(double value);
/// "(a,b,c)" using alphabet labels.
std::string format_configuration(const FactorGraphModel& model, const Configuration& x);
std::string format_bits(const Bits& bits);
/// Comma- or space-separated reals, e.g. "1.0,0.5".
std::vector<double> parse_real_list(std::string_view text);

/// Multi-line report; the first line is "configuration (..)" or "failure".
std::string render_receiver_output(const FactorGraphModel& model, const ReceiverOutput& output);
std::string render_equalizer_decision(const EqualizerDecision& decision);

struct CompareRow {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    OutcomeKind lp_outcome = OutcomeKind::Failure;
    Rational lp_objective;
    Configuration lp_configuration; ///< empty on failure
    bool oracle_agree = false;      ///< meaningful for configurations only
    Configuration sp_configuration;
    bool sp_converged = false;
    bool sp_valid = false;
    bool agree = false;             ///< LP configuration equals the SP decision
};

struct CompareOptions {
    FormulationKind formulation = FormulationKind::RelaxedQtilde;
    double noise = 1.0;             ///< std-dev added to every log weight
    std::uint64_t cap = kDefaultEnumerationCap;
    SpSettings sp;
    std::size_t workers = 0;
};

/// Trial t perturbs the model's log evidence with N(0, noise^2) draws from
/// seed derive_seed(seed, t), then runs the LP receiver, the oracle and SP.
std::vector<CompareRow> compare_trials(const FactorGraphModel& model, std::size_t trials, std::uint64_t seed,
                                       const CompareOptions& options = {});
std::string compare_csv(const FactorGraphModel& model, const std::vector<CompareRow>& rows);

std::string simulation_csv(const std::vector<ErrorRateRow>& rows);

struct CoverRoundTrip {
    CoverLift lift;
    bool valid = false;
    bool round_trip_exact = false;
};

/// lp_point_to_cover, then validity and exact return through cover_to_lp_point.
CoverRoundTrip cover_round_trip(const FactorGraphModel& model, const LpPoint& q_point);
std::string render_cover_round_trip(const CoverRoundTrip& result);

/// Multi-line summary: sizes, |B| and injectivity when enumerable under `cap`.
std::string describe_model(const FactorGraphModel& model, std::uint64_t cap = kDefaultEnumerationCap);

} // namespace lprx
