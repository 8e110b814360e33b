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

// Acceptance gate. Each criterion prints one PASS/FAIL line; the exit code is
// nonzero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "reluqubo/report.hpp"
#include "../support/random_models.hpp"

namespace reluqubo {
namespace {

namespace fs = std::filesystem;
using testing::bits_of;
using testing::Rng;

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

// Tangent-fit parameters (a_m, b_m, alpha_m) of exp(-q) on [0, 4], y_end = 0.
struct Row {
    double a;
    double b;
    double alpha;
};
const std::vector<std::vector<Row>> kReferenceTangents = {
        {{-1.0, 1.0, 0.0}, {-0.0498, 0.199, 0.8428}},
        {{-1.0, 1.0, 0.0}, {-0.3265, 0.6920, 0.4574}, {-0.0498, 0.1991, 1.7809}},
        {{-1.0, 1.0, 0.0}, {-0.4950, 0.8431, 0.3108}, {-0.1959, 0.5153, 1.0961}, {-0.0498, 0.1991, 2.1633}},
};

Outcome ac1() {
    const fs::path dir = fs::temp_directory_path() / "reluqubo_acceptance_ac1";
    double worst = 0.0;
    std::ostringstream sink;
    for (int pieces = 2; pieces <= 4; ++pieces) {
        cli::PipelineConfig cfg;
        cfg.curve = "exp_neg";
        cfg.domain = Interval{0.0, 4.0};
        cfg.relu.y_end = 0.0;
        cfg.relu.pieces = pieces;
        cfg.out_dir = dir;
        const cli::FitReport report = cli::cmd_fit(cfg, sink);
        const Polyline& p = *report.fits.at(0).polyline;
        const auto& rows = kReferenceTangents[pieces - 2];
        if (p.num_pieces() != rows.size()) return {false, "M=" + std::to_string(pieces) + ": wrong piece count"};
        for (std::size_t m = 0; m < rows.size(); ++m) {
            worst = std::max({worst, std::abs(p.pieces()[m].slope - rows[m].a),
                              std::abs(p.pieces()[m].intercept - rows[m].b),
                              std::abs(p.breakpoints()[m] - rows[m].alpha)});
        }
        worst = std::max(worst, std::abs(p.breakpoints().back() - 4.0));
    }
    return {worst <= 1e-3, "max |deviation| = " + fmt(worst) + " (tol 1e-3)"};
}

Model random_model(Rng& rng, ModelFamily family, std::size_t n, std::size_t k) {
    switch (family) {
        case ModelFamily::gmm:
            return testing::random_gmm(rng, n, k);
        case ModelFamily::kernel:
            return testing::random_kr(rng, n, k);
        case ModelFamily::nn:
            return testing::random_nn(rng, n, k);
    }
    throw Error("unknown family");
}

Outcome ac2() {
    Rng rng(2002);
    std::size_t checked = 0;
    std::size_t mismatched = 0;
    std::size_t paper_divergent = 0;
    for (std::size_t n : {4, 8}) {
        for (std::size_t k : {1, 2, 3}) {
            for (int pieces : {2, 4}) {
                for (auto family : {ModelFamily::gmm, ModelFamily::kernel, ModelFamily::nn}) {
                    const auto obj = to_canonical(random_model(rng, family, n, k));
                    ReluQuadratizeConfig cfg;
                    cfg.pieces = pieces;
                    for (auto method : {Method::discretization, Method::relu, Method::mixed}) {
                        Compilation c;
                        try {
                            c = quadratize(obj, method, cfg);
                        } catch (const UnsupportedCombinationError&) {
                            continue;
                        } catch (const CapabilityError&) {
                            continue;
                        }
                        const ResourceReport r = resource_report(c);
                        if (!r.formula_registered) continue;
                        ++checked;
                        if (!r.matches_registered()) ++mismatched;
                        if (r.formula_printed && !(*r.formula_printed == r.actual)) ++paper_divergent;
                    }
                }
            }
        }
    }
    return {checked > 0 && mismatched == 0,
            std::to_string(checked) + " cells checked, " + std::to_string(mismatched) +
                    " mismatches (D+1-bit convention; " + std::to_string(paper_divergent) +
                    " differ from the printed D-bit counts)"};
}

Outcome ac3() {
    Rng rng(3003);
    double worst = 0.0;
    std::size_t instances = 0;
    for (auto family : {ModelFamily::gmm, ModelFamily::kernel, ModelFamily::nn}) {
        for (int i = 0; i < 50; ++i) {
            const std::size_t n = testing::uniform_int(rng, 4, 10);
            const std::size_t k = testing::uniform_int(rng, 1, 3);
            ReluQuadratizeConfig cfg;
            cfg.pieces = 4;
            const Compilation c = quadratize_relu_method(to_canonical(random_model(rng, family, n, k)), cfg);
            const auto values = inner_max_values(c.problem);
            for (std::uint64_t code = 0; code < values.size(); ++code) {
                worst = std::max(worst, std::abs(values[code] - c.qubo_target(bits_of(code, n))));
            }
            ++instances;
        }
    }
    return {worst <= 1e-9, std::to_string(instances) + " instances, max |inner max - target| = " +
                                   fmt(worst) + " (tol 1e-9)"};
}

Outcome ac4() {
    Rng rng(4004);
    double worst = 0.0;
    std::size_t infeasible = 0;
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = testing::uniform_int(rng, 4, 10);
        const std::size_t k = testing::uniform_int(rng, 1, 3);
        const Model m = i % 2 ? Model(testing::random_kr(rng, n, k)) : Model(testing::random_gmm(rng, n, k));
        const Compilation c = quadratize_discretization(to_canonical(m), {});
        const SolveResult r = structured_brute_force(c.problem);
        double best = -INFINITY;
        for (std::uint64_t code = 0; code < (1u << n); ++code) {
            best = std::max(best, evaluate_model(m, bits_of(code, n)));
        }
        worst = std::max(worst, std::abs(r.best_value - best));
        for (const auto& p : c.problem.penalties()) {
            if (p.residual(r.best_assignment) != 0.0) ++infeasible;
        }
    }
    return {worst <= 1e-9 && infeasible == 0,
            "50 instances, max |QUBO optimum - max F| = " + fmt(worst) + ", " +
                    std::to_string(infeasible) + " nonzero penalty residuals"};
}

Outcome ac5() {
    Rng rng(5005);
    std::size_t violations = 0;
    std::ostringstream first;
    for (int i = 0; i < 20; ++i) {
        const std::size_t n = testing::uniform_int(rng, 4, 10);
        const std::size_t k = testing::uniform_int(rng, 1, 5);
        const auto obj = to_canonical(Model(testing::random_gmm(rng, n, k)));
        const auto rows = approximation_error_sweep(obj, {2, 3, 4});
        for (std::size_t j = 1; j < rows.size(); ++j) {
            if (rows[j].max_error > rows[j - 1].max_error) {
                if (violations++ == 0) {
                    first << "; first at instance " << i << ", M=" << rows[j].M;
                }
            }
        }
    }
    return {violations == 0, "20 GMM instances, " + std::to_string(violations) +
                                     " increases of max error over M = 2, 3, 4" + first.str()};
}

Outcome ac6() {
    Rng rng(6006);
    std::size_t bound_failures = 0;
    std::size_t coverage_failures = 0;
    std::size_t enumerated = 0;
    for (int i = 0; i < 200; ++i) {
        const int n = testing::uniform_int(rng, 1, 64);
        double alpha = testing::uniform(rng, 0.0, n);
        if (alpha == std::floor(alpha)) alpha += 0.5;
        const int d = *bit_width(0.0, n, alpha);
        if (d > static_cast<int>(std::ceil(std::log2(n)))) ++bound_failures;
        if (n > 16) continue;
        ++enumerated;
        // Every attainable u - floor(alpha) must be some 1 - 2^D + sum 2^j z_j.
        std::set<long> encoded;
        for (long z = 0; z < (1L << (d + 1)); ++z) encoded.insert(1 - (1L << d) + z);
        const long fa = static_cast<long>(std::floor(alpha));
        for (long u = 0; u <= n; ++u) {
            if (!encoded.count(u - fa)) {
                ++coverage_failures;
                break;
            }
        }
    }
    return {bound_failures == 0 && coverage_failures == 0,
            "200 pairs, " + std::to_string(bound_failures) + " exceed ceil(log2 N); " +
                    std::to_string(enumerated) + " enumerated, " + std::to_string(coverage_failures) +
                    " coverage gaps"};
}

Outcome ac7() {
    std::vector<Model> models{load_model(RELUQUBO_FIXTURES "/kr_mixed.json"),
                              load_model(RELUQUBO_FIXTURES "/nn.json")};
    Rng rng(7007);
    for (int i = 0; i < 10; ++i) {
        models.push_back(testing::random_kr(rng, testing::uniform_int(rng, 4, 8), 3, 1 + i % 2));
        models.push_back(testing::random_nn(rng, testing::uniform_int(rng, 4, 8), 3, 1 + i % 2));
    }
    std::size_t audited = 0;
    double mismatches = 0.0;
    for (const auto& m : models) {
        ReluQuadratizeConfig cfg;
        cfg.pieces = 3;
        const Compilation c = quadratize_relu_method(to_canonical(m), cfg);
        for (const auto& check : verify_compilation(c).checks) {
            if (check.name != "sign_bit_semantics" || check.skipped) continue;
            ++audited;
            mismatches += check.measure;
        }
    }
    return {audited > 0 && mismatches == 0.0,
            std::to_string(audited) + " models with negative terms audited, " + fmt(mismatches) +
                    " sign mismatches"};
}

Outcome ac8() {
    const auto f = ScalarCurve::exp_neg({0.0, 4.0});
    std::vector<double> errors;
    for (int pieces : {8, 16, 32}) errors.push_back(max_grid_error(f, c2_relu_expansion(f, pieces)));
    const double r1 = errors[0] / errors[1];
    const double r2 = errors[1] / errors[2];
    return {r1 >= 2.0 && r2 >= 2.0, "max errors " + fmt(errors[0]) + ", " + fmt(errors[1]) + ", " +
                                            fmt(errors[2]) + "; reduction ratios " + fmt(r1) + ", " +
                                            fmt(r2) + " (need >= 2)"};
}

// Compiled problems from all three families with at most 12 decision variables.
std::vector<QuboProblem> calibration_suite() {
    Rng rng(9009);
    std::vector<QuboProblem> suite;
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = testing::uniform_int(rng, 4, 12);
        const std::size_t k = testing::uniform_int(rng, 1, 2);
        const auto family = static_cast<ModelFamily>(i % 3);
        ReluQuadratizeConfig cfg;
        cfg.pieces = testing::uniform_int(rng, 2, 3);
        suite.push_back(quadratize_relu_method(to_canonical(random_model(rng, family, n, k)), cfg).problem);
    }
    return suite;
}

Outcome ac9() {
    const AnnealingSchedule schedule{2000, 0.1, 10.0};
    const auto suite = calibration_suite();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const double exact = structured_brute_force(suite[i]).best_value;
        const SolveResult sa = simulated_annealing(suite[i], schedule, i, 64);
        if (sa.best_value >= exact - 1e-9 * (1.0 + std::abs(exact))) ++hits;
    }
    const SolveResult a = simulated_annealing(suite[0], schedule, 42, 64, 1);
    const SolveResult b = simulated_annealing(suite[0], schedule, 42, 64, 4);
    const bool deterministic = a.best_assignment == b.best_assignment && a.best_value == b.best_value &&
                               a.stats.evaluations == b.stats.evaluations;
    return {hits >= 95 && deterministic,
            std::to_string(hits) + "/100 optima found (need 95); repeat run " +
                    (deterministic ? "identical" : "differs")};
}

struct Criterion {
    int id;
    std::function<Outcome()> run;
    double limit_seconds;  // <= 0: no stated limit
};

}  // namespace
}  // namespace reluqubo

int main(int argc, char** argv) {
    using namespace reluqubo;
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    app.add_option("--only", only, "Run only these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{{1, ac1, 5.0},  {2, ac2, 10.0}, {3, ac3, 60.0},
                                          {4, ac4, 60.0}, {5, ac5, 0.0},  {6, ac6, 0.0},
                                          {7, ac7, 0.0},  {8, ac8, 0.0},  {9, ac9, 0.0}};
    bool all = true;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0.0 && seconds > c.limit_seconds) {
            o.passed = false;
            o.detail += "; runtime over " + fmt(c.limit_seconds) + " s";
        }
        std::cout << (o.passed ? "PASS" : "FAIL") << " AC" << c.id << ": " << o.detail << " ["
                  << fmt(seconds) << " s]" << std::endl;
        all &= o.passed;
    }
    return all ? 0 : 1;
}
