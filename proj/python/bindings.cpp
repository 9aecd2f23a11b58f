// Python module _lprx. Exact rationals cross the boundary as fractions.Fraction.

#include "lprx/desk_models.hpp"
#include "lprx/equalizer.hpp"
#include "lprx/error.hpp"
#include "lprx/harness.hpp"
#include "lprx/model_io.hpp"
#include "lprx/pseudo.hpp"
#include "lprx/receiver.hpp"
#include "lprx/sum_product.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace lprx;

namespace {

py::object fraction(const Rational& value)
{
    static py::object cls = py::module_::import("fractions").attr("Fraction");
    return cls(to_string(value));
}

Rational from_fraction(const py::handle& value)
{
    return parse_rational(py::str(value).cast<std::string>());
}

py::list fractions(const std::vector<Rational>& values)
{
    py::list out;
    for (const auto& v : values) {
        out.append(fraction(v));
    }
    return out;
}

std::vector<std::string> catalog(const LinearProgram& program)
{
    std::vector<std::string> names;
    for (const auto& key : program.variables) {
        names.push_back(to_string(key));
    }
    return names;
}

LinearProgram program_for(const FactorGraphModel& model, FormulationKind kind, std::uint64_t cap)
{
    switch (kind) {
    case FormulationKind::ExactVRep: return build_exact_vrep(model, cap);
    case FormulationKind::ReducedExact: return build_reduced_exact(model, cap);
    case FormulationKind::RelaxedQtilde: return build_relaxed_qtilde(model);
    case FormulationKind::TheoreticalQ: return build_theoretical_q(model);
    }
    return {};
}

LpPoint q_point_from(const FactorGraphModel& model, const py::sequence& values)
{
    LpPoint point;
    for (const auto& v : values) {
        point.values.push_back(from_fraction(v));
    }
    if (point.values.size() != QLayout(model).size) {
        throw ValidationError("point length does not match the Q catalog");
    }
    return point;
}

py::dict cover_dict(const FactorGraphModel& model, const CoverLift& lift)
{
    py::dict d;
    d["degree"] = lift.cover.degree;
    d["permutations"] = lift.cover.permutations;
    d["labels"] = lift.labels;
    d["point"] = fractions(cover_to_lp_point(model, lift.cover, lift.labels).values);
    return d;
}

} // namespace

PYBIND11_MODULE(_lprx, m)
{
    m.doc() = "Exact LP receivers for factor-graph models";

    auto& base = py::register_exception<Error>(m, "Error");
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<CapExceededError>(m, "CapExceededError", base.ptr());
    py::register_exception<ConstructionError>(m, "ConstructionError", base.ptr());

    py::class_<FactorGraphModel>(m, "Model")
        .def_property_readonly("num_variables", &FactorGraphModel::num_variables)
        .def_property_readonly("num_behaviours", &FactorGraphModel::num_behaviours)
        .def_property_readonly("observed", &FactorGraphModel::observed_variables)
        .def("name", &FactorGraphModel::name)
        .def("alphabet", [](const FactorGraphModel& model, VariableId i) { return model.alphabet(i).symbols(); })
        .def("is_valid", &FactorGraphModel::is_valid, py::arg("configuration"))
        .def("log_score", [](const FactorGraphModel& model, const Configuration& x) { return log_score(model, x); })
        .def(
            "with_log_evidence",
            [](const FactorGraphModel& model, const std::map<VariableId, std::vector<double>>& logs) {
                std::vector<EvidenceTable> evidence;
                for (const auto& [i, l] : logs) {
                    evidence.push_back(EvidenceTable::from_log_weights(i, l));
                }
                return model.with_evidence(std::move(evidence));
            },
            py::arg("log_weights"), "New evidence keyed by variable index")
        .def("to_json", [](const FactorGraphModel& model) { return model_to_json(model); })
        .def("describe", [](const FactorGraphModel& model) { return describe_model(model); });

    m.def("load_model", &load_model, py::arg("path"));
    m.def("parse_model_json", [](const std::string& text) { return parse_model_json(text); }, py::arg("text"));
    m.def("repetition_model", &repetition_model, py::arg("h1") = std::vector<double>{1.0, 2.0},
          py::arg("h2") = std::vector<double>{1.0, 3.0});
    m.def("equality_triangle", &equality_triangle, py::arg("lambda_tilde") = std::vector<double>{0, 0, 0});
    m.def("exclusion_triangle", &exclusion_triangle, py::arg("lambda_tilde") = std::vector<double>{0, 0, 0});
    m.def("chain_model", &chain_model, py::arg("length") = 3, py::arg("alphabet") = 3);
    m.def("hidden_chain_model", &hidden_chain_model);
    m.def("random_tree_model", &random_tree_model, py::arg("seed"), py::arg("max_variables") = 10);

    m.def("global_behaviour", &global_behaviour, py::arg("model"), py::arg("cap") = kDefaultEnumerationCap);
    m.def("brute_force_optimum", &brute_force_optimum, py::arg("model"), py::arg("cap") = kDefaultEnumerationCap);
    m.def("check_injectivity", &check_injectivity, py::arg("model"), py::arg("cap") = kDefaultEnumerationCap);

    py::class_<ReceiverOutput>(m, "ReceiverOutput")
        .def_property_readonly("kind", [](const ReceiverOutput& o) { return std::string(outcome_name(o.kind)); })
        .def_property_readonly("configuration", [](const ReceiverOutput& o) -> py::object {
            if (o.kind == OutcomeKind::Failure) {
                return py::none();
            }
            return py::cast(o.configuration);
        })
        .def_property_readonly("formulation",
                               [](const ReceiverOutput& o) { return std::string(formulation_name(o.formulation)); })
        .def_property_readonly("objective", [](const ReceiverOutput& o) { return fraction(o.objective); })
        .def_property_readonly("certified_optimal", [](const ReceiverOutput& o) { return o.certified_optimal; })
        .def_property_readonly("pivot_count", [](const ReceiverOutput& o) { return o.pivot_count; })
        .def_property_readonly("variables", [](const ReceiverOutput& o) { return catalog(o.program); })
        .def_property_readonly("point", [](const ReceiverOutput& o) { return fractions(o.point.values); });

    m.def(
        "run_receiver",
        [](const FactorGraphModel& model, const std::string& formulation, std::uint64_t cap) {
            ReceiverOptions options;
            options.cap = cap;
            return run_receiver(model, parse_formulation(formulation), options);
        },
        py::arg("model"), py::arg("formulation") = "qtilde", py::arg("cap") = kDefaultEnumerationCap);

    m.def(
        "dump_program",
        [](const FactorGraphModel& model, const std::string& formulation, std::uint64_t cap) {
            return dump(program_for(model, parse_formulation(formulation), cap));
        },
        py::arg("model"), py::arg("formulation") = "qtilde", py::arg("cap") = kDefaultEnumerationCap);

    m.def(
        "verify_derived_constraints",
        [](const ReceiverOutput& output) { return verify_derived_constraints(output.program, output.point).violations; },
        py::arg("output"), "Violations of the implied box and simplex constraints (empty when they hold)");

    m.def(
        "run_sum_product",
        [](const FactorGraphModel& model, std::size_t max_iterations, double damping, double tolerance) {
            SpSettings settings{max_iterations, damping, tolerance};
            const auto out = run_sum_product(model, settings);
            py::dict d;
            d["beliefs"] = out.beliefs;
            d["decision"] = out.decision;
            d["converged"] = out.converged;
            d["valid"] = out.valid;
            d["iterations"] = out.iterations;
            return d;
        },
        py::arg("model"), py::arg("max_iterations") = 100, py::arg("damping") = 0.0, py::arg("tolerance") = 1e-12);

    m.def(
        "cover_round_trip",
        [](const FactorGraphModel& model, const py::sequence& q_point) {
            const auto result = cover_round_trip(model, q_point_from(model, q_point));
            py::dict d = cover_dict(model, result.lift);
            d["valid"] = result.valid;
            d["round_trip_exact"] = result.round_trip_exact;
            return d;
        },
        py::arg("model"), py::arg("q_point"), "Q point (catalog order of formulation 'q') -> graph cover and back");

    m.def(
        "random_cover_configuration",
        [](const FactorGraphModel& model, std::size_t degree, std::uint64_t seed) -> py::object {
            const auto lift = random_cover_configuration(model, degree, seed);
            if (!lift) {
                return py::none();
            }
            return cover_dict(model, *lift);
        },
        py::arg("model"), py::arg("degree"), py::arg("seed"));

    m.def("hamming_7_4", [] { return hamming_7_4().dense(); });

    m.def(
        "decode_equalizer",
        [](const std::vector<std::vector<int>>& h, const std::vector<double>& taps,
           const std::vector<double>& received, double sigma2) {
            const auto code = ParityCheckMatrix::from_dense(h);
            const Trellis trellis = build_trellis(ChannelSpec{taps, sigma2});
            const auto metrics = branch_metrics(trellis, received, sigma2);
            const auto decision = run_explicit_receiver(code, trellis, metrics);
            py::dict d;
            d["kind"] = std::string(outcome_name(decision.kind));
            d["codeword"] = std::vector<int>(decision.codeword.begin(), decision.codeword.end());
            d["pre_bits"] = std::vector<int>(decision.pre_bits.begin(), decision.pre_bits.end());
            d["objective"] = fraction(decision.objective);
            return d;
        },
        py::arg("h"), py::arg("taps"), py::arg("received"), py::arg("sigma2"));

    m.def(
        "simulate_error_rates",
        [](const std::vector<std::vector<int>>& h, const std::vector<double>& taps,
           const std::vector<double>& snr_db, std::size_t trials, std::uint64_t seed) {
            py::gil_scoped_release release;
            return simulation_csv(simulate_error_rates(ParityCheckMatrix::from_dense(h), taps, snr_db, trials, seed));
        },
        py::arg("h"), py::arg("taps"), py::arg("snr_db"), py::arg("trials"), py::arg("seed"),
        "CSV text with one row per SNR point");
}
