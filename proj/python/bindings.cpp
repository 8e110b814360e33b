// Copyright 2026 The reluqubo Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reluqubo/io.hpp"
#include "reluqubo/models.hpp"
#include "reluqubo/quadratize.hpp"
#include "reluqubo/report.hpp"
#include "reluqubo/solve.hpp"

namespace py = pybind11;
using namespace reluqubo;

namespace {

Method parse_method(const std::string& s) { return method_from_string(s); }

ModelFamily parse_family(const std::string& s) {
    if (s == "gmm") return ModelFamily::gmm;
    if (s == "kernel") return ModelFamily::kernel;
    if (s == "nn") return ModelFamily::nn;
    throw InvalidConfigError("unknown family '" + s + "' (gmm, kernel, nn)");
}

std::vector<std::tuple<Index, Index, double>> quadratic_terms(const QuboProblem& p) {
    std::vector<std::tuple<Index, Index, double>> out;
    for (const auto& t : p.quadratic()) out.emplace_back(t.i, t.j, t.value);
    return out;
}

// Holder so the model variant binds as one opaque class.
struct PyModel {
    Model model;
};

std::string qubo_text(const QuboProblem& p) {
    std::ostringstream s;
    write_qubo_text(s, p);
    return s.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quadratization of regression models into QUBO problems";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
    py::register_exception<InvalidPolylineError>(m, "InvalidPolylineError", error.ptr());
    py::register_exception<ConvexityError>(m, "ConvexityError", error.ptr());
    py::register_exception<FitFailureError>(m, "FitFailureError", error.ptr());
    py::register_exception<CapabilityError>(m, "CapabilityError", error.ptr());
    py::register_exception<SizeError>(m, "SizeError", error.ptr());
    py::register_exception<UnsupportedCombinationError>(m, "UnsupportedCombinationError", error.ptr());
    py::register_exception<InvalidConfigError>(m, "InvalidConfigError", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());

    py::class_<ScalarCurve>(m, "Curve")
            .def_static("exp_neg", [](double lo, double hi) { return ScalarCurve::exp_neg({lo, hi}); },
                        py::arg("lo"), py::arg("hi"))
            .def_static("rational_quadratic",
                        [](double gamma, double gamma_prime, double lo, double hi) {
                            return ScalarCurve::rational_quadratic(gamma, gamma_prime, {lo, hi});
                        },
                        py::arg("gamma"), py::arg("gamma_prime"), py::arg("lo"), py::arg("hi"))
            .def_static("linear",
                        [](double slope, double intercept, double lo, double hi) {
                            return ScalarCurve::linear(slope, intercept, {lo, hi});
                        },
                        py::arg("slope"), py::arg("intercept"), py::arg("lo"), py::arg("hi"))
            .def("__call__", [](const ScalarCurve& f, double q) { return f(q); })
            .def_property_readonly("name", &ScalarCurve::name)
            .def_property_readonly("domain", [](const ScalarCurve& f) {
                return std::make_pair(f.domain().lo, f.domain().hi);
            });

    py::class_<Polyline>(m, "Polyline")
            .def_property_readonly("slopes",
                                   [](const Polyline& p) {
                                       std::vector<double> v;
                                       for (const auto& l : p.pieces()) v.push_back(l.slope);
                                       return v;
                                   })
            .def_property_readonly("intercepts",
                                   [](const Polyline& p) {
                                       std::vector<double> v;
                                       for (const auto& l : p.pieces()) v.push_back(l.intercept);
                                       return v;
                                   })
            .def_property_readonly("breakpoints", [](const Polyline& p) { return p.breakpoints(); })
            .def("__call__", [](const Polyline& p, double q) { return eval_polyline(p, q).value; })
            .def("to_relu", &polyline_to_relu);

    py::class_<ReluExpansion>(m, "ReluExpansion")
            .def_property_readonly("base_slope", &ReluExpansion::base_slope)
            .def_property_readonly("base_intercept", &ReluExpansion::base_intercept)
            .def_property_readonly("terms",
                                   [](const ReluExpansion& e) {
                                       std::vector<std::pair<double, double>> v;
                                       for (const auto& t : e.terms()) v.emplace_back(t.coefficient, t.threshold);
                                       return v;
                                   })
            .def("__call__", [](const ReluExpansion& e, double q) { return eval_relu(e, q); });

    py::class_<TangentFit>(m, "TangentFit")
            .def_readonly("polyline", &TangentFit::polyline)
            .def_readonly("tangent_points", &TangentFit::tangent_points)
            .def_readonly("residual", &TangentFit::residual);

    m.def("fit_tangent", &fit_tangent, py::arg("curve"), py::arg("pieces"), py::arg("y_end") = py::none());
    m.def("fit_spline", &fit_spline_polyline, py::arg("curve"), py::arg("pieces"));
    m.def("c2_expansion", &c2_relu_expansion, py::arg("curve"), py::arg("pieces"));
    m.def("max_grid_error", &max_grid_error, py::arg("curve"), py::arg("expansion"),
          py::arg("samples") = 20000);

    py::class_<PyModel>(m, "Model")
            .def_static("from_json", [](const std::string& text) { return PyModel{parse_model_json(text)}; },
                        py::arg("text"))
            .def_static("load", [](const std::string& path) { return PyModel{load_model(path)}; }, py::arg("path"))
            .def("to_json", [](const PyModel& p) { return model_to_json(p.model); })
            .def_property_readonly("family", [](const PyModel& p) { return to_string(family_of(p.model)); })
            .def_property_readonly("dimension", [](const PyModel& p) { return dimension_of(p.model); })
            .def("evaluate", [](const PyModel& p, const Assignment& x) {
                if (x.size() != dimension_of(p.model)) throw DimensionError("assignment has the wrong length");
                return evaluate_model(p.model, x);
            });

    py::class_<QuboProblem>(m, "QuboProblem")
            .def_static("from_text",
                        [](const std::string& text) {
                            std::istringstream s(text);
                            return read_qubo_text(s);
                        },
                        py::arg("text"))
            .def("to_text", &qubo_text)
            .def_property_readonly("num_variables", &QuboProblem::num_variables)
            .def_property_readonly("num_decisions", &QuboProblem::num_decisions)
            .def_property_readonly("num_penalties", [](const QuboProblem& p) { return p.penalties().size(); })
            .def_property_readonly("labels",
                                   [](const QuboProblem& p) {
                                       std::vector<std::string> v;
                                       for (std::size_t i = 0; i < p.num_variables(); ++i) {
                                           v.push_back(p.registry()[i].label);
                                       }
                                       return v;
                                   })
            .def_property_readonly("constant", &QuboProblem::constant)
            .def_property_readonly("linear",
                                   [](const QuboProblem& p) {
                                       return std::vector<double>(p.linear().begin(), p.linear().end());
                                   })
            .def_property_readonly("quadratic", &quadratic_terms)
            .def("evaluate", [](const QuboProblem& p, const Assignment& s) { return evaluate_qubo(p, s); });

    py::class_<Compilation>(m, "Compilation")
            .def_readonly("problem", &Compilation::problem)
            .def_property_readonly("method", [](const Compilation& c) { return to_string(c.method); })
            .def_readonly("bits", &Compilation::bits)
            .def_readonly("dropped_constant", &Compilation::dropped_constant)
            .def_readonly("representation_error", &Compilation::representation_error)
            .def_readonly("warnings", &Compilation::warnings)
            .def("surrogate", [](const Compilation& c, const Assignment& x) { return c.surrogate(x); })
            .def("qubo_target", [](const Compilation& c, const Assignment& x) { return c.qubo_target(x); })
            .def("sidecar_json", [](const Compilation& c) { return sidecar_json(c).dump(); });

    m.def(
            "quadratize",
            [](const PyModel& model, const std::string& method, int pieces, const std::string& strategy,
               double penalty_scale, std::optional<int> bits, std::optional<double> y_end,
               std::optional<double> lambda, std::optional<double> lambda_prime) {
                ReluQuadratizeConfig r;
                r.pieces = pieces;
                r.strategy = fit_strategy_from_string(strategy);
                r.penalty_scale = penalty_scale;
                r.bits = bits;
                r.y_end = y_end;
                DiscretizeConfig d;
                d.penalty_scale = penalty_scale;
                d.lambda = lambda;
                d.lambda_prime = lambda_prime;
                return quadratize(to_canonical(model.model), parse_method(method), r, d);
            },
            py::arg("model"), py::arg("method") = "relu", py::arg("pieces") = 4,
            py::arg("strategy") = "tangent", py::arg("penalty_scale") = 2.0, py::arg("bits") = py::none(),
            py::arg("y_end") = py::none(), py::arg("lam") = py::none(), py::arg("lambda_prime") = py::none());

    py::class_<SolveResult>(m, "SolveResult")
            .def_readonly("best_assignment", &SolveResult::best_assignment)
            .def_readonly("best_value", &SolveResult::best_value)
            .def_readonly("decision_projection", &SolveResult::decision_projection)
            .def_readonly("feasible", &SolveResult::feasible)
            .def_property_readonly("evaluations", [](const SolveResult& r) { return r.stats.evaluations; });

    m.def("brute_force", &brute_force, py::arg("problem"), py::arg("max_variables") = 26,
          py::call_guard<py::gil_scoped_release>());
    m.def("structured_brute_force", &structured_brute_force, py::arg("problem"),
          py::arg("max_decisions") = 20, py::call_guard<py::gil_scoped_release>());
    m.def(
            "simulated_annealing",
            [](const QuboProblem& p, int sweeps, double beta_start, double beta_end, std::uint64_t seed,
               int restarts, int threads) {
                return simulated_annealing(p, {sweeps, beta_start, beta_end}, seed, restarts, threads);
            },
            py::arg("problem"), py::arg("sweeps") = 2000, py::arg("beta_start") = 0.1,
            py::arg("beta_end") = 10.0, py::arg("seed") = 0, py::arg("restarts") = 64, py::arg("threads") = 0,
            py::call_guard<py::gil_scoped_release>());

    m.def("verify_json", [](const Compilation& c) { return to_json(verify_compilation(c)).dump(); },
          py::arg("compilation"));
    m.def("resources_json", [](const Compilation& c) { return to_json(resource_report(c)).dump(); },
          py::arg("compilation"));
    m.def(
            "table2_formula",
            [](const std::string& method, const std::string& family, std::size_t N, std::size_t K,
               std::size_t K_p, std::size_t K_n, std::size_t M, std::size_t D, bool registered) {
                const ResourceCounts c = table2_formula(
                        parse_method(method), parse_family(family), ResourceParams{N, K, K_p, K_n, M, D},
                        registered ? BitConvention::registered : BitConvention::printed);
                return std::make_pair(c.aux, c.penalty);
            },
            py::arg("method"), py::arg("family"), py::arg("N") = 0, py::arg("K") = 0, py::arg("K_p") = 0,
            py::arg("K_n") = 0, py::arg("M") = 0, py::arg("D") = 0, py::arg("registered") = false);
    m.def(
            "error_sweep",
            [](const PyModel& model, const std::vector<int>& pieces, const std::string& strategy,
               std::size_t samples, std::uint64_t seed) {
                ReluQuadratizeConfig base;
                base.strategy = fit_strategy_from_string(strategy);
                std::vector<std::tuple<int, double, double>> out;
                for (const auto& r : approximation_error_sweep(to_canonical(model.model), pieces, base, samples, seed)) {
                    out.emplace_back(r.M, r.max_error, r.mean_error);
                }
                return out;
            },
            py::arg("model"), py::arg("pieces"), py::arg("strategy") = "tangent", py::arg("samples") = 10000,
            py::arg("seed") = 0);
}
