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

#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "reluqubo/report.hpp"

namespace reluqubo::cli {

namespace fs = std::filesystem;

namespace {

Solver solver_from_string(const std::string& s) {
    if (s == "brute") return Solver::brute;
    if (s == "structured") return Solver::structured;
    if (s == "sa") return Solver::annealing;
    throw InvalidConfigError("unknown solver '" + s + "' (brute, structured, sa)");
}

std::string fixed(double v, int width = 12, int precision = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%*.*f", width, precision, v);
    return buf;
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

Json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string() + ": cannot open");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": invalid JSON: " + e.what());
    }
}

Model require_model(const PipelineConfig& cfg) {
    if (cfg.model_path.empty()) throw InvalidConfigError("no model given (--model or config 'model')");
    return load_model(cfg.model_path);
}

Compilation compile_model(const PipelineConfig& cfg) {
    const Model model = require_model(cfg);
    return quadratize(to_canonical(model), cfg.method, cfg.relu, cfg.discretize);
}

fs::path sidecar_path(const fs::path& qubo) {
    return qubo.parent_path() / (qubo.stem().string() + ".sidecar.json");
}

void print_fit(std::ostream& log, const CurveFit& fit, const PipelineConfig& cfg) {
    log << "curve " << fit.curve << " on [" << format_double(fit.domain.lo) << ", "
        << format_double(fit.domain.hi) << "], M = " << cfg.relu.pieces << " ("
        << to_string(cfg.relu.strategy) << ")\n";
    if (fit.polyline) {
        const auto& pieces = fit.polyline->pieces();
        const auto& bp = fit.polyline->breakpoints();
        log << "  m" << "         a_m" << "         b_m" << "     alpha_m\n";
        for (std::size_t m = 0; m <= pieces.size(); ++m) {
            log << "  " << m;
            if (m < pieces.size()) {
                log << fixed(pieces[m].slope) << fixed(pieces[m].intercept);
            } else {
                log << "           -           -";
            }
            log << fixed(bp[m]) << '\n';
        }
    } else {
        log << "  base slope " << format_double(fit.expansion.base_slope()) << ", intercept "
            << format_double(fit.expansion.base_intercept()) << '\n';
        log << "  m" << " coefficient" << "   threshold\n";
        for (std::size_t m = 0; m < fit.expansion.size(); ++m) {
            log << "  " << m + 1 << fixed(fit.expansion.terms()[m].coefficient, 12, 6)
                << fixed(fit.expansion.terms()[m].threshold) << '\n';
        }
    }
}

CurveFit fit_curve(const ScalarCurve& f, const ReluQuadratizeConfig& rc) {
    CurveFit fit{f.name(), f.domain(), {}, std::nullopt, ReluExpansion(0.0, 0.0, {}), {}};
    switch (rc.strategy) {
        case FitStrategy::tangent: {
            TangentFit t = fit_tangent(f, rc.pieces, rc.y_end);
            fit.tangent_points = t.tangent_points;
            fit.polyline = std::move(t.polyline);
            break;
        }
        case FitStrategy::spline:
            fit.polyline = fit_spline_polyline(f, rc.pieces);
            break;
        case FitStrategy::c2:
            fit.expansion = c2_relu_expansion(f, rc.pieces);
            return fit;
    }
    fit.expansion = polyline_to_relu(*fit.polyline);
    return fit;
}

}  // namespace

void apply_config_json(PipelineConfig& cfg, const Json& doc, const fs::path& base_dir) {
    if (!doc.is_object()) throw InvalidConfigError("config must be a JSON object");
    auto path_of = [&](const std::string& p) {
        const fs::path v(p);
        return (v.is_absolute() ? v : base_dir / v).string();
    };
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "model") {
                cfg.model_path = path_of(value.get<std::string>());
            } else if (key == "qubo") {
                cfg.qubo_path = path_of(value.get<std::string>());
            } else if (key == "method") {
                cfg.method = method_from_string(value.get<std::string>());
            } else if (key == "pieces") {
                cfg.relu.pieces = value.get<int>();
            } else if (key == "strategy") {
                cfg.relu.strategy = fit_strategy_from_string(value.get<std::string>());
            } else if (key == "penalty_scale") {
                cfg.relu.penalty_scale = value.get<double>();
                cfg.discretize.penalty_scale = cfg.relu.penalty_scale;
            } else if (key == "bits") {
                cfg.relu.bits = value.get<int>();
            } else if (key == "real_bits") {
                cfg.relu.real_bits = value.get<int>();
            } else if (key == "y_end") {
                cfg.relu.y_end = value.get<double>();
            } else if (key == "lambda") {
                cfg.discretize.lambda = value.get<double>();
            } else if (key == "lambda_prime") {
                cfg.discretize.lambda_prime = value.get<double>();
            } else if (key == "solver") {
                cfg.solver = solver_from_string(value.get<std::string>());
            } else if (key == "sweeps") {
                cfg.schedule.sweeps = value.get<int>();
            } else if (key == "beta_start") {
                cfg.schedule.beta_start = value.get<double>();
            } else if (key == "beta_end") {
                cfg.schedule.beta_end = value.get<double>();
            } else if (key == "restarts") {
                cfg.restarts = value.get<int>();
            } else if (key == "seed") {
                cfg.seed = value.get<std::uint64_t>();
            } else if (key == "out_dir") {
                cfg.out_dir = path_of(value.get<std::string>());
            } else if (key == "sweep_pieces") {
                cfg.sweep_pieces = value.get<std::vector<int>>();
            } else {
                throw InvalidConfigError("unknown config field '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfigError(std::string("config field has the wrong type: ") + e.what());
    }
}

FitReport cmd_fit(const PipelineConfig& cfg, std::ostream& log) {
    cfg.relu.validate();
    FitReport report;
    if (!cfg.curve.empty()) {
        const Interval dom = cfg.domain.value_or(Interval{0.0, 4.0});
        ScalarCurve f = cfg.curve == "exp_neg" ? ScalarCurve::exp_neg(dom)
                        : cfg.curve == "rational_quadratic"
                                ? ScalarCurve::rational_quadratic(cfg.gamma, cfg.gamma_prime, dom)
                                : throw InvalidConfigError("unknown curve '" + cfg.curve +
                                                           "' (exp_neg, rational_quadratic)");
        report.fits.push_back(fit_curve(f, cfg.relu));
    } else {
        const CanonicalObjective obj = to_canonical(require_model(cfg));
        if (obj.already_relu) {
            report.already_relu = true;
        } else {
            std::map<std::tuple<std::string, double, double>, std::size_t> index;
            for (std::size_t k = 0; k < obj.terms.size(); ++k) {
                const ScalarCurve& f = obj.terms[k].curve;
                const auto key = std::make_tuple(f.name(), f.domain().lo, f.domain().hi);
                auto it = index.find(key);
                if (it == index.end()) {
                    it = index.emplace(key, report.fits.size()).first;
                    report.fits.push_back(fit_curve(f, cfg.relu));
                }
                report.fits[it->second].terms.push_back(static_cast<int>(k));
            }
        }
    }

    Json doc{{"strategy", to_string(cfg.relu.strategy)},
             {"pieces", cfg.relu.pieces},
             {"already_relu", report.already_relu},
             {"curves", Json::array()}};
    if (report.already_relu) {
        log << "model is already a sum of ReLU terms, no fit needed\n";
    }
    for (const auto& fit : report.fits) {
        Json entry{{"curve", fit.curve},
                   {"domain", {fit.domain.lo, fit.domain.hi}},
                   {"terms", fit.terms},
                   {"expansion", to_json(fit.expansion)}};
        if (fit.polyline) entry["polyline"] = to_json(*fit.polyline);
        if (!fit.tangent_points.empty()) entry["tangent_points"] = fit.tangent_points;
        doc["curves"].push_back(std::move(entry));
        print_fit(log, fit, cfg);
    }
    write_file(cfg.out_dir / "polylines.json", doc.dump(2) + "\n");
    return report;
}

Compilation cmd_build(const PipelineConfig& cfg, std::ostream& log) {
    Compilation c = compile_model(cfg);
    std::ostringstream qubo;
    write_qubo_text(qubo, c.problem);
    write_file(cfg.out_dir / "qubo.txt", qubo.str());
    write_file(cfg.out_dir / "qubo.sidecar.json", sidecar_json(c).dump(2) + "\n");

    const auto& reg = c.problem.registry();
    log << "method " << to_string(c.method) << ", family " << to_string(c.objective.family)
        << ": " << reg.num_decisions() << " decision + " << reg.num_auxiliary()
        << " auxiliary variables, " << c.problem.penalties().size() << " penalty terms\n";
    log << "sign split: " << c.split.delta_p.size() << " positive, " << c.split.delta_n.size()
        << " negative ReLU terms";
    if (c.bits) log << ", D = " << *c.bits;
    log << '\n';
    for (const auto& w : c.warnings) log << "warning: " << w << '\n';
    return c;
}

SolveResult cmd_solve(const PipelineConfig& cfg, std::ostream& log) {
    const fs::path qubo_path = cfg.qubo_path.empty() ? cfg.out_dir / "qubo.txt" : fs::path(cfg.qubo_path);
    std::ifstream in(qubo_path);
    if (!in) throw ParseError(qubo_path.string() + ": cannot open");
    QuboProblem read = read_qubo_text(in);

    std::vector<PenaltyConstraint> penalties;
    if (const fs::path side = sidecar_path(qubo_path); fs::exists(side)) {
        penalties = sidecar_penalties(read_json_file(side));
    }
    const auto quadratic = read.quadratic();
    const auto linear = read.linear();
    const QuboProblem problem(read.registry(), {quadratic.begin(), quadratic.end()},
                              {linear.begin(), linear.end()}, read.constant(),
                              std::move(penalties));

    SolveResult r;
    std::string solver;
    switch (cfg.solver) {
        case Solver::brute:
            r = brute_force(problem);
            solver = "brute";
            break;
        case Solver::structured:
            r = structured_brute_force(problem);
            solver = "structured";
            break;
        case Solver::annealing:
            r = simulated_annealing(problem, cfg.schedule, cfg.seed, cfg.restarts);
            solver = "sa";
            break;
    }
    Json doc = to_json(problem, r);
    doc["solver"] = solver;
    doc["seed"] = cfg.seed;
    write_file(cfg.out_dir / "result.json", doc.dump(2) + "\n");
    log << solver << ": value " << format_double(r.best_value) << ", x = "
        << assignment_to_string(r.decision_projection) << (r.feasible ? "" : " (infeasible)")
        << '\n';
    return r;
}

VerificationReport cmd_verify(const PipelineConfig& cfg, std::ostream& log) {
    const Compilation c = compile_model(cfg);
    VerificationReport v = verify_compilation(c);
    Json doc = to_json(v);
    doc["method"] = to_string(c.method);
    doc["resources"] = to_json(resource_report(c));
    write_file(cfg.out_dir / "verification.json", doc.dump(2) + "\n");
    for (const auto& check : v.checks) {
        log << (check.skipped ? "SKIP" : check.passed ? "PASS" : "FAIL") << ' ' << check.name
            << ": " << check.detail << '\n';
    }
    return v;
}

ResourceReport cmd_report(const PipelineConfig& cfg, std::ostream& log) {
    const Compilation c = compile_model(cfg);
    ResourceReport r = resource_report(c);
    Json doc = to_json(r);
    std::vector<ErrorRow> rows;
    if (c.method != Method::discretization) {
        rows = approximation_error_sweep(c.objective, cfg.sweep_pieces, cfg.relu, 10000, cfg.seed);
        doc["error_sweep"] = to_json(rows);
        std::ostringstream csv;
        write_error_csv(csv, rows);
        write_file(cfg.out_dir / "error_sweep.csv", csv.str());
    }
    write_file(cfg.out_dir / "resources.json", doc.dump(2) + "\n");

    log << "resources (" << to_string(r.method) << ", " << to_string(r.family) << "): aux "
        << r.actual.aux << ", penalties " << r.actual.penalty << '\n';
    if (r.formula_printed) {
        log << "  closed form, D bits per negative term:     aux " << r.formula_printed->aux
            << ", penalties " << r.formula_printed->penalty << '\n';
        log << "  closed form, D + 1 bits per negative term: aux " << r.formula_registered->aux
            << ", penalties " << r.formula_registered->penalty << '\n';
    }
    for (const auto& row : rows) {
        log << "  M = " << row.M << ": max error " << format_double(row.max_error)
            << ", mean error " << format_double(row.mean_error) << '\n';
    }
    return r;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compile regression models into QUBO problems via ReLU expansion"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> config, model, qubo, method, strategy, solver, curve, out_dir;
    std::optional<int> pieces, bits, sweeps, restarts;
    std::optional<double> penalty_scale, lambda, lambda_prime, y_end, beta_start, beta_end;
    std::optional<std::uint64_t> seed;
    std::vector<double> domain;
    std::vector<int> sweep_pieces;
    double gamma = 1.0;
    double gamma_prime = 1.0;

    app.add_option("--config", config, "JSON config file; flags override its fields");
    app.add_option("--model", model, "Model JSON file");
    app.add_option("--out-dir", out_dir, "Output directory");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--method", method, "Quadratization method")
            ->check(CLI::IsMember({"disc", "relu", "mixed"}));
    app.add_option("--pieces", pieces, "Pieces M per fitted curve");
    app.add_option("--strategy", strategy, "Polyline fit")
            ->check(CLI::IsMember({"tangent", "spline", "c2"}));
    app.add_option("--penalty-scale", penalty_scale, "Multiplier of the default penalty weights");
    app.add_option("--bits", bits, "Sign-bit width D");
    app.add_option("--lambda", lambda, "Discretization value penalty");
    app.add_option("--lambda-prime", lambda_prime, "Discretization one-hot penalty");

    auto* fit = app.add_subcommand("fit", "Fit polylines and list their parameters");
    fit->add_option("--curve", curve, "Fit a bare curve instead of a model")
            ->check(CLI::IsMember({"exp_neg", "rational_quadratic"}));
    fit->add_option("--domain", domain, "Curve domain LO HI")->expected(2);
    fit->add_option("--y-end", y_end, "Value the last tangent passes through at the domain end");
    fit->add_option("--gamma", gamma, "Rational quadratic gamma");
    fit->add_option("--gamma-prime", gamma_prime, "Rational quadratic gamma'");

    app.add_subcommand("build", "Write qubo.txt and qubo.sidecar.json");

    auto* solve = app.add_subcommand("solve", "Solve a QUBO file and write result.json");
    solve->add_option("--qubo", qubo, "QUBO text file (default: <out-dir>/qubo.txt)");
    solve->add_option("--solver", solver, "Solver")
            ->check(CLI::IsMember({"brute", "structured", "sa"}));
    solve->add_option("--sweeps", sweeps, "Annealing sweeps");
    solve->add_option("--restarts", restarts, "Annealing restarts");
    solve->add_option("--beta-start", beta_start, "Initial inverse temperature");
    solve->add_option("--beta-end", beta_end, "Final inverse temperature");

    app.add_subcommand("verify", "Audit a compiled model and write verification.json");
    auto* report = app.add_subcommand("report", "Write resources.json and error_sweep.csv");
    report->add_option("--sweep-pieces", sweep_pieces, "Values of M for the error sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        PipelineConfig cfg;
        if (config) {
            const fs::path path(*config);
            apply_config_json(cfg, read_json_file(path), path.parent_path());
        }
        if (model) cfg.model_path = *model;
        if (qubo) cfg.qubo_path = *qubo;
        if (out_dir) cfg.out_dir = *out_dir;
        if (seed) cfg.seed = *seed;
        if (method) cfg.method = method_from_string(*method);
        if (pieces) cfg.relu.pieces = *pieces;
        if (strategy) cfg.relu.strategy = fit_strategy_from_string(*strategy);
        if (penalty_scale) {
            cfg.relu.penalty_scale = *penalty_scale;
            cfg.discretize.penalty_scale = *penalty_scale;
        }
        if (bits) cfg.relu.bits = *bits;
        if (lambda) cfg.discretize.lambda = *lambda;
        if (lambda_prime) cfg.discretize.lambda_prime = *lambda_prime;
        if (y_end) cfg.relu.y_end = *y_end;
        if (solver) cfg.solver = solver_from_string(*solver);
        if (sweeps) cfg.schedule.sweeps = *sweeps;
        if (restarts) cfg.restarts = *restarts;
        if (beta_start) cfg.schedule.beta_start = *beta_start;
        if (beta_end) cfg.schedule.beta_end = *beta_end;
        if (!sweep_pieces.empty()) cfg.sweep_pieces = sweep_pieces;
        if (curve) cfg.curve = *curve;
        if (!domain.empty()) cfg.domain = Interval{domain[0], domain[1]};
        cfg.gamma = gamma;
        cfg.gamma_prime = gamma_prime;

        if (fit->parsed()) {
            cmd_fit(cfg, out);
        } else if (app.got_subcommand("build")) {
            cmd_build(cfg, out);
        } else if (solve->parsed()) {
            cmd_solve(cfg, out);
        } else if (app.got_subcommand("verify")) {
            return cmd_verify(cfg, out).passed() ? 0 : 1;
        } else if (report->parsed()) {
            cmd_report(cfg, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace reluqubo::cli
