// lprx: exact LP receivers for factor-graph models.
//
//   lprx decode --model m.json [--evidence e.json] [--formulation qtilde]
//   lprx decode --code hamming --taps 1.0,0.5 --snr-db 12 --seed 7
//   lprx simulate --code hamming --snr-db 8,10,12 --trials 100 --out rates.csv
//   lprx cover-roundtrip --model m.json [--point p.json] [--out cover.json]
//   lprx compare --model m.json --trials 100 --seed 3 --out rows.csv
//   lprx validate-model --model m.json
//
// Exit status: 0 configuration (or success), 2 receiver failure, 1 error.

#include "lprx/desk_models.hpp"
#include "lprx/error.hpp"
#include "lprx/harness.hpp"
#include "lprx/model_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

namespace {

using namespace lprx;

struct Options {
    std::string model;
    std::string evidence;
    std::string alist;
    std::string code;
    std::string taps = "1.0,0.5";
    std::optional<double> sigma2;
    std::string snr_db;
    std::string received;
    std::string point;
    std::string formulation = "qtilde";
    std::string out;
    std::string timing_log;
    std::uint64_t seed = 1;
    std::size_t trials = 100;
    std::uint64_t cap = kDefaultEnumerationCap;
    double noise = 1.0;
    bool generic = false;
};

void emit(const Options& opt, const std::string& text)
{
    if (opt.out.empty()) {
        std::cout << text;
    } else {
        write_text_file(opt.out, text);
    }
}

void log_timing(const Options& opt, const std::string& what, std::chrono::steady_clock::time_point start)
{
    if (opt.timing_log.empty()) {
        return;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream log(opt.timing_log, std::ios::app);
    log << what << ' ' << format_double(secs) << "s\n";
}

ParityCheckMatrix load_code(const Options& opt)
{
    if (!opt.alist.empty()) {
        return load_parity_check_matrix(opt.alist);
    }
    if (opt.code == "triangle") {
        return triangle_code();
    }
    if (opt.code == "hamming") {
        return hamming_7_4();
    }
    if (opt.code == "ldpc20") {
        return regular_ldpc_20();
    }
    throw ValidationError(opt.code.empty() ? "one of --model, --alist or --code is required"
                                           : "unknown code '" + opt.code + "' (triangle, hamming, ldpc20)");
}

ChannelSpec channel_from(const Options& opt)
{
    auto taps = parse_real_list(opt.taps);
    if (opt.sigma2) {
        ChannelSpec spec{std::move(taps), *opt.sigma2};
        spec.validate();
        return spec;
    }
    const auto snr = opt.snr_db.empty() ? std::vector<double>{12.0} : parse_real_list(opt.snr_db);
    if (snr.size() != 1) {
        throw ValidationError("decode takes a single SNR value");
    }
    return ChannelSpec::from_snr_db(std::move(taps), snr.front());
}

FactorGraphModel model_from(const Options& opt)
{
    auto model = load_model(opt.model);
    if (!opt.evidence.empty()) {
        model = model.with_evidence(parse_evidence_json(model, read_text_file(opt.evidence), opt.evidence));
    }
    return model;
}

int cmd_decode(const Options& opt)
{
    const auto formulation = parse_formulation(opt.formulation);
    if (!opt.model.empty()) {
        const auto model = model_from(opt);
        ReceiverOptions ro;
        ro.cap = opt.cap;
        const auto output = run_receiver(model, formulation, ro);
        emit(opt, render_receiver_output(model, output));
        return output.kind == OutcomeKind::Configuration ? kExitConfiguration : kExitFailure;
    }
    const auto h = load_code(opt);
    const auto channel = channel_from(opt);
    const Trellis trellis = build_trellis(channel);
    std::vector<double> received;
    std::string header;
    if (!opt.received.empty()) {
        received = parse_real_list(read_text_file(opt.received));
    } else {
        const auto tx = simulate_transmission(h, channel, opt.seed);
        received = tx.received;
        header = "transmitted " + format_bits(tx.codeword) + " pre-block " + format_bits(tx.pre_bits) + "\n";
    }
    const auto metrics = branch_metrics(trellis, received, channel.sigma2);
    if (opt.generic) {
        const auto model = build_equalizer_model(h, trellis, metrics);
        ReceiverOptions ro;
        ro.cap = opt.cap;
        const auto output = run_receiver(model, formulation, ro);
        emit(opt, header + render_receiver_output(model, output));
        return output.kind == OutcomeKind::Configuration ? kExitConfiguration : kExitFailure;
    }
    const auto decision = run_explicit_receiver(h, trellis, metrics);
    emit(opt, header + render_equalizer_decision(decision));
    return decision.kind == OutcomeKind::Configuration ? kExitConfiguration : kExitFailure;
}

int cmd_simulate(const Options& opt)
{
    const auto start = std::chrono::steady_clock::now();
    const auto h = load_code(opt);
    const auto snr = parse_real_list(opt.snr_db.empty() ? "12" : opt.snr_db);
    const auto rows = simulate_error_rates(h, parse_real_list(opt.taps), snr, opt.trials, opt.seed);
    emit(opt, simulation_csv(rows));
    log_timing(opt, "simulate", start);
    return kExitConfiguration;
}

int cmd_cover_roundtrip(const Options& opt)
{
    if (opt.model.empty()) {
        throw ValidationError("--model is required");
    }
    const auto model = model_from(opt);
    const auto program = build_theoretical_q(model);
    LpPoint point;
    if (!opt.point.empty()) {
        point = parse_point_json(program, read_text_file(opt.point), opt.point);
    } else {
        ReceiverOptions ro;
        ro.cap = opt.cap;
        point = run_receiver(model, FormulationKind::TheoreticalQ, ro).point;
    }
    const auto result = cover_round_trip(model, point);
    std::cout << render_cover_round_trip(result);
    if (!opt.out.empty()) {
        write_text_file(opt.out, cover_to_json(model, result.lift));
    } else {
        std::cout << cover_to_json(model, result.lift);
    }
    return result.valid && result.round_trip_exact ? kExitConfiguration : kExitError;
}

int cmd_compare(const Options& opt)
{
    if (opt.model.empty()) {
        throw ValidationError("--model is required");
    }
    const auto start = std::chrono::steady_clock::now();
    const auto model = model_from(opt);
    CompareOptions co;
    co.formulation = parse_formulation(opt.formulation);
    co.noise = opt.noise;
    co.cap = opt.cap;
    const auto rows = compare_trials(model, opt.trials, opt.seed, co);
    emit(opt, compare_csv(model, rows));
    log_timing(opt, "compare", start);
    return kExitConfiguration;
}

int cmd_validate(const Options& opt)
{
    if (!opt.model.empty()) {
        const auto model = model_from(opt);
        std::cout << "model ok\n" << describe_model(model, opt.cap);
        return kExitConfiguration;
    }
    const auto h = load_code(opt);
    std::cout << "code ok\nlength: " << h.cols() << "\nchecks: " << h.rows()
              << "\ndimension: " << codeword_basis(h).size() << '\n';
    return kExitConfiguration;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact LP receivers for factor-graph models"};
    app.require_subcommand(1);
    Options opt;

    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--model", opt.model, "Model JSON file");
        sub->add_option("--evidence", opt.evidence, "Evidence JSON replacing the model's own");
        sub->add_option("--cap", opt.cap, "Enumeration cap for exhaustive steps")->check(CLI::PositiveNumber);
    };
    auto add_code = [&](CLI::App* sub) {
        sub->add_option("--alist", opt.alist, "Parity-check matrix (alist or dense 0/1 text)");
        sub->add_option("--code", opt.code, "Built-in code: triangle, hamming, ldpc20");
        sub->add_option("--taps", opt.taps, "Channel taps h_0..h_L, comma separated");
    };

    auto* decode = app.add_subcommand("decode", "Run one LP receiver");
    add_model(decode);
    add_code(decode);
    decode->add_option("--formulation", opt.formulation, "vrep, reduced, qtilde or q");
    auto* sigma = decode->add_option("--sigma2", opt.sigma2, "Noise variance");
    decode->add_option("--snr-db", opt.snr_db, "E_s / sigma^2 in dB")->excludes(sigma);
    decode->add_option("--received", opt.received, "Received samples, whitespace separated");
    decode->add_option("--seed", opt.seed, "Seed for a simulated transmission");
    decode->add_flag("--generic", opt.generic, "Use the generic factor-graph build of the equalizer");
    decode->add_option("--out", opt.out, "Write the report here instead of stdout");

    auto* simulate = app.add_subcommand("simulate", "Error-rate table over an SNR grid");
    add_code(simulate);
    simulate->add_option("--snr-db", opt.snr_db, "SNR grid in dB, comma separated");
    simulate->add_option("--trials", opt.trials, "Trials per SNR point");
    simulate->add_option("--seed", opt.seed, "Master seed");
    simulate->add_option("--out", opt.out, "CSV output path");
    simulate->add_option("--timing-log", opt.timing_log, "Append wall-clock timing here");

    auto* cover = app.add_subcommand("cover-roundtrip", "Q point -> graph cover -> Q point");
    add_model(cover);
    cover->add_option("--point", opt.point, "Q point JSON; default: the Q receiver's vertex");
    cover->add_option("--out", opt.out, "Cover JSON output path");

    auto* compare = app.add_subcommand("compare", "Per-trial LP versus sum-product outcomes");
    add_model(compare);
    compare->add_option("--trials", opt.trials, "Number of trials");
    compare->add_option("--seed", opt.seed, "Master seed");
    compare->add_option("--formulation", opt.formulation, "vrep, reduced, qtilde or q");
    compare->add_option("--noise", opt.noise, "Std-dev of the log-evidence perturbation");
    compare->add_option("--out", opt.out, "CSV output path");
    compare->add_option("--timing-log", opt.timing_log, "Append wall-clock timing here");

    auto* validate = app.add_subcommand("validate-model", "Parse and check a model or code");
    add_model(validate);
    add_code(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (decode->parsed()) {
            return cmd_decode(opt);
        }
        if (simulate->parsed()) {
            return cmd_simulate(opt);
        }
        if (cover->parsed()) {
            return cmd_cover_roundtrip(opt);
        }
        if (compare->parsed()) {
            return cmd_compare(opt);
        }
        return cmd_validate(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}
