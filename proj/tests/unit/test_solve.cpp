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

#include <cmath>

#include "catch_amalgamated.hpp"

#include "reluqubo/quadratize.hpp"
#include "reluqubo/solve.hpp"
#include "../support/random_models.hpp"

namespace reluqubo {

using Catch::Matchers::WithinAbs;
using testing::bits_of;

namespace {

// Plain enumeration in lexicographic order, b_0 most significant.
std::pair<double, Assignment> naive_max(const QuboProblem& p) {
    const std::size_t n = p.num_variables();
    double best = -INFINITY;
    Assignment arg;
    for (std::uint64_t code = 0; code < (1ull << n); ++code) {
        Assignment s(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = (code >> (n - 1 - i)) & 1u;
        const double v = evaluate_qubo(p, s);
        if (arg.empty() || v > best + 1e-12 * (1.0 + std::abs(best))) std::tie(best, arg) = std::make_pair(v, s);
    }
    return {best, arg};
}

Compilation compile_gmm(testing::Rng& rng, std::size_t n, std::size_t k, int pieces) {
    ReluQuadratizeConfig cfg;
    cfg.pieces = pieces;
    return quadratize_relu_method(to_canonical(testing::random_gmm(rng, n, k)), cfg);
}

}  // namespace

TEST_CASE("brute force small examples", "[solve]") {
    const QuboProblem empty(VariableRegistry::with_decisions(0), {}, {}, 2.5);
    CHECK(brute_force(empty).best_value == 2.5);

    const QuboProblem p(VariableRegistry::with_decisions(2), {}, {1.0, -1.0}, 0.0);
    const SolveResult r = brute_force(p);
    CHECK(r.best_assignment == Assignment{1, 0});
    CHECK(r.best_value == 1.0);
    CHECK(r.feasible);

    // All-zero objective: every assignment ties, the smallest wins.
    const QuboProblem flat(VariableRegistry::with_decisions(3), {}, {0.0, 0.0, 0.0}, 0.0);
    CHECK(brute_force(flat).best_assignment == Assignment{0, 0, 0});

    CHECK_THROWS_AS(brute_force(p, 1), SizeError);
}

TEST_CASE("brute force agrees with naive enumeration", "[solve]") {
    testing::Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const QuboProblem p = testing::random_qubo(rng, 1 + trial % 12);
        const SolveResult r = brute_force(p);
        const auto [best, arg] = naive_max(p);
        CHECK_THAT(r.best_value, WithinAbs(best, 1e-12));
        CHECK(r.best_assignment == arg);
        CHECK(evaluate_qubo(p, r.best_assignment) == r.best_value);
    }
}

TEST_CASE("structured solver agrees with brute force", "[solve]") {
    testing::Rng rng(13);
    SECTION("GMM, N = 10, K = 2, M = 4") {
        const Compilation c = compile_gmm(rng, 10, 2, 4);
        REQUIRE(c.problem.num_variables() == 18);
        const SolveResult a = brute_force(c.problem);
        const SolveResult b = structured_brute_force(c.problem);
        CHECK(a.best_assignment == b.best_assignment);
        CHECK(a.best_value == b.best_value);
    }
    SECTION("no auxiliaries") {
        const QuboProblem p = testing::random_qubo(rng, 9);
        const SolveResult a = brute_force(p);
        const SolveResult b = structured_brute_force(p);
        CHECK(a.best_assignment == b.best_assignment);
        CHECK(a.best_value == b.best_value);
    }
    SECTION("sign bits and one-hot groups") {
        for (int trial = 0; trial < 4; ++trial) {
            const auto obj = to_canonical(Model(testing::random_kr(rng, 5, 2, 1)));
            ReluQuadratizeConfig cfg;
            cfg.pieces = 2;
            const Method method = trial % 2 ? Method::mixed : Method::relu;
            const Compilation c = quadratize(obj, method, cfg);
            REQUIRE(c.problem.num_variables() <= 24);
            const SolveResult a = brute_force(c.problem);
            const SolveResult b = structured_brute_force(c.problem);
            CHECK(a.best_assignment == b.best_assignment);
            CHECK_THAT(a.best_value, WithinAbs(b.best_value, 1e-12));
        }
    }
}

TEST_CASE("inner max values reproduce the surrogate", "[solve]") {
    testing::Rng rng(19);
    const Compilation c = compile_gmm(rng, 8, 3, 3);
    const auto values = inner_max_values(c.problem);
    REQUIRE(values.size() == 256);
    for (std::uint64_t code = 0; code < 256; ++code) {
        const Assignment x = bits_of(code, 8);
        CHECK_THAT(values[code], WithinAbs(c.qubo_target(x), 1e-9));
        const Assignment s = best_completion(c.problem, x);
        CHECK_THAT(evaluate_qubo(c.problem, s), WithinAbs(values[code], 1e-12));
    }
    std::uint64_t visits = 0;
    Assignment previous;
    for_each_inner_max(c.problem, [&](std::span<const std::uint8_t> x, const Assignment& full, double v) {
        const Assignment cur(x.begin(), x.end());
        if (visits > 0) CHECK(previous < cur);
        previous = cur;
        CHECK(std::equal(x.begin(), x.end(), full.begin()));
        CHECK_THAT(evaluate_qubo(c.problem, full), WithinAbs(v, 1e-12));
        ++visits;
    });
    CHECK(visits == 256);
}

TEST_CASE("auxiliary groups reject cross-group couplings", "[solve]") {
    QuboBuilder b(1);
    const Index t1 = b.add_variable("t[0,1]", VariableKind::dual_t, Origin{0, 1, -1});
    const Index t2 = b.add_variable("t[0,2]", VariableKind::dual_t, Origin{0, 2, -1});
    b.add_quadratic(t1, t2, 1.0);
    const QuboProblem p = std::move(b).build();
    CHECK_THROWS_AS(auxiliary_groups(p), Error);
}

TEST_CASE("simulated annealing", "[solve]") {
    testing::Rng rng(29);
    SECTION("deterministic per seed") {
        const QuboProblem p = testing::random_qubo(rng, 20);
        const AnnealingSchedule schedule{200, 0.1, 10.0};
        const SolveResult a = simulated_annealing(p, schedule, 5, 8, 1);
        const SolveResult b = simulated_annealing(p, schedule, 5, 8, 3);
        CHECK(a.best_assignment == b.best_assignment);
        CHECK(a.best_value == b.best_value);
        CHECK(a.stats.evaluations == b.stats.evaluations);
    }
    SECTION("zero sweeps returns an evaluated initial assignment") {
        const QuboProblem p = testing::random_qubo(rng, 6);
        const SolveResult r = simulated_annealing(p, {0, 0.1, 10.0}, 1, 1, 1);
        CHECK(r.best_assignment.size() == 6);
        CHECK(evaluate_qubo(p, r.best_assignment) == r.best_value);
    }
    SECTION("never beats brute force and usually matches") {
        int hits = 0;
        for (int trial = 0; trial < 20; ++trial) {
            const QuboProblem p = testing::random_qubo(rng, 10);
            const SolveResult exact = brute_force(p);
            const SolveResult sa = simulated_annealing(p, {300, 0.1, 10.0}, trial, 8);
            CHECK(sa.best_value <= exact.best_value + 1e-12);
            CHECK_THAT(evaluate_qubo(p, sa.best_assignment), WithinAbs(sa.best_value, 1e-9));
            if (sa.best_value >= exact.best_value - 1e-9) ++hits;
        }
        CHECK(hits >= 19);
    }
}

TEST_CASE("feasibility flag reflects penalties", "[solve]") {
    QuboBuilder b(2);
    b.add_penalty(PenaltyKind::one_hot_count, Origin{0, -1, -1}, AffineExpr{{{0, 1.0}, {1, 1.0}}, -1.0},
                  0.1);
    b.add_linear(0, 1.0);
    b.add_linear(1, 1.0);
    const QuboProblem p = std::move(b).build();
    const SolveResult r = brute_force(p);
    // A weak penalty lets both variables switch on.
    CHECK(r.best_assignment == Assignment{1, 1});
    CHECK_FALSE(r.feasible);
    CHECK(make_result(p, {1, 0}).feasible);
    CHECK(assignment_to_string(r.best_assignment) == "11");
}

}  // namespace reluqubo
