#include "lprx/harness.hpp"

#include "lprx/error.hpp"
#include "lprx/parallel.hpp"
#include "lprx/random.hpp"

#include <cstdio>
#include <sstream>

namespace lprx {

std::string format_double(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string format_configuration(const FactorGraphModel& model, const Configuration& x)
{
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += (i ? "," : "") + model.alphabet(i).symbol(x[i]);
    }
    return s + ")";
}

std::string format_bits(const Bits& bits)
{
    std::string s;
    for (auto b : bits) {
        s += b ? '1' : '0';
    }
    return s;
}

std::vector<double> parse_real_list(std::string_view text)
{
    std::vector<double> out;
    std::string token;
    auto flush = [&] {
        if (token.empty()) {
            return;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != token.size()) {
            throw ParseError("'" + token + "' is not a real number");
        }
        out.push_back(v);
        token.clear();
    };
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            flush();
        } else {
            token += c;
        }
    }
    flush();
    if (out.empty()) {
        throw ParseError("expected at least one real number");
    }
    return out;
}

namespace {

void append_fractional(std::ostringstream& out, const LinearProgram& program, const LpPoint& point)
{
    out << "fractional point (nonzero coordinates):\n";
    for (std::size_t k = 0; k < program.num_variables(); ++k) {
        if (!is_zero(point.values[k])) {
            out << "  " << to_string(program.variables[k]) << " = " << to_string(point.values[k]) << '\n';
        }
    }
}

} // namespace

std::string render_receiver_output(const FactorGraphModel& model, const ReceiverOutput& output)
{
    std::ostringstream out;
    if (output.kind == OutcomeKind::Configuration) {
        out << "configuration " << format_configuration(model, output.configuration) << '\n';
    } else {
        out << "failure\n";
    }
    out << "formulation: " << formulation_name(output.formulation) << '\n';
    out << "objective: " << to_string(output.objective) << '\n';
    out << "certified optimal: " << (output.certified_optimal ? "yes" : "no") << '\n';
    out << "pivots: " << output.pivot_count << '\n';
    if (output.kind == OutcomeKind::Failure) {
        append_fractional(out, output.program, output.point);
    }
    return out.str();
}

std::string render_equalizer_decision(const EqualizerDecision& decision)
{
    std::ostringstream out;
    if (decision.kind == OutcomeKind::Configuration) {
        out << "configuration " << format_bits(decision.codeword) << '\n';
        out << "pre-block bits: " << format_bits(decision.pre_bits) << '\n';
    } else {
        out << "failure\n";
        out << "hard decisions: " << format_bits(decision.codeword) << '\n';
    }
    out << "objective: " << to_string(decision.objective) << '\n';
    out << "pivots: " << decision.pivot_count << '\n';
    if (decision.kind == OutcomeKind::Failure) {
        append_fractional(out, decision.program, decision.point);
    }
    return out.str();
}

std::vector<CompareRow> compare_trials(const FactorGraphModel& model, std::size_t trials, std::uint64_t seed,
                                       const CompareOptions& options)
{
    if (trials == 0) {
        throw ValidationError("trials must be at least 1");
    }
    options.sp.validate();
    std::vector<CompareRow> rows(trials);
    parallel_for(
        trials,
        [&](std::size_t t) {
            CompareRow& row = rows[t];
            row.trial = t;
            row.seed = derive_seed(seed, t);
            Rng rng(row.seed);
            std::vector<EvidenceTable> evidence;
            for (const auto& e : model.evidence_tables()) {
                auto logs = e.log_weights();
                for (double& l : logs) {
                    l += options.noise * rng.normal();
                }
                evidence.push_back(EvidenceTable::from_log_weights(e.variable(), std::move(logs)));
            }
            const auto trial_model = model.with_evidence(std::move(evidence));
            ReceiverOptions ro;
            ro.cap = options.cap;
            const auto lp = run_receiver(trial_model, options.formulation, ro);
            row.lp_outcome = lp.kind;
            row.lp_objective = lp.objective;
            row.lp_configuration = lp.configuration;
            row.oracle_agree = lp.kind == OutcomeKind::Configuration && certify_against_oracle(trial_model, lp, options.cap);
            const auto sp = run_sum_product(trial_model, options.sp);
            row.sp_configuration = sp.decision;
            row.sp_converged = sp.converged;
            row.sp_valid = sp.valid;
            row.agree = lp.kind == OutcomeKind::Configuration && lp.configuration == sp.decision;
        },
        options.workers == 0 ? worker_count() : options.workers);
    return rows;
}

std::string compare_csv(const FactorGraphModel& model, const std::vector<CompareRow>& rows)
{
    std::ostringstream out;
    out << "trial,seed,lp_outcome,lp_objective,lp_configuration,oracle_agree,sp_configuration,sp_converged,sp_valid,"
           "agree\n";
    for (const auto& r : rows) {
        const bool integral = r.lp_outcome == OutcomeKind::Configuration;
        out << r.trial << ',' << r.seed << ',' << outcome_name(r.lp_outcome) << ',' << to_string(r.lp_objective)
            << ',' << (integral ? '"' + format_configuration(model, r.lp_configuration) + '"' : std::string())
            << ',' << (integral ? (r.oracle_agree ? "1" : "0") : "") << ",\""
            << format_configuration(model, r.sp_configuration) << "\"," << int(r.sp_converged) << ','
            << int(r.sp_valid) << ',' << int(r.agree) << '\n';
    }
    return out.str();
}

std::string simulation_csv(const std::vector<ErrorRateRow>& rows)
{
    std::ostringstream out;
    out << "snr_db,trials,wer,ber,failure_rate,ml_cert_rate,sp_lp_agreement\n";
    for (const auto& r : rows) {
        out << format_double(r.snr_db) << ',' << r.trials << ',' << format_double(r.wer) << ','
            << format_double(r.ber) << ',' << format_double(r.failure_rate) << ',' << format_double(r.ml_cert_rate)
            << ',' << format_double(r.sp_lp_agreement) << '\n';
    }
    return out.str();
}

CoverRoundTrip cover_round_trip(const FactorGraphModel& model, const LpPoint& q_point)
{
    CoverRoundTrip result;
    result.lift = lp_point_to_cover(model, q_point);
    result.valid = is_valid_cover_configuration(model, result.lift.cover, result.lift.labels);
    result.round_trip_exact = result.valid && cover_to_lp_point(model, result.lift.cover, result.lift.labels) == q_point;
    return result;
}

std::string render_cover_round_trip(const CoverRoundTrip& result)
{
    std::ostringstream out;
    out << "degree: " << result.lift.cover.degree << '\n';
    out << "valid cover configuration: " << (result.valid ? "yes" : "no") << '\n';
    out << "round trip exact: " << (result.round_trip_exact ? "yes" : "no") << '\n';
    return out.str();
}

std::string describe_model(const FactorGraphModel& model, std::uint64_t cap)
{
    std::ostringstream out;
    out << "variables: " << model.num_variables() << '\n';
    out << "behaviours: " << model.num_behaviours() << '\n';
    out << "observed: " << model.observed_variables().size() << '\n';
    const auto space = configuration_space_size(model);
    out << "configuration space: " << space << '\n';
    if (space <= cap) {
        const auto behaviour = global_behaviour(model, cap);
        out << "global behaviour size: " << behaviour.size() << '\n';
        out << "injective on evidence: " << (check_injectivity(model, cap) ? "yes" : "no") << '\n';
    } else {
        out << "global behaviour size: skipped (above cap)\n";
    }
    return out.str();
}

} // namespace lprx
