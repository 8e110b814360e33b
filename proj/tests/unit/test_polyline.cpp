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

#include <algorithm>
#include <cmath>

#include "catch_amalgamated.hpp"

#include "reluqubo/polyline.hpp"
#include "../support/random_models.hpp"

namespace reluqubo {

using Catch::Matchers::WithinAbs;

namespace {

struct Row {
    double a;
    double b;
    double alpha;
};

// Published tangent-fit parameters of exp(-q) on [0, 4] with y_end = 0.
const std::vector<std::vector<Row>> kPublished = {
        {{-1.0, 1.0, 0.0}, {-0.0498, 0.199, 0.8428}},
        {{-1.0, 1.0, 0.0}, {-0.3265, 0.6920, 0.4574}, {-0.0498, 0.1991, 1.7809}},
        {{-1.0, 1.0, 0.0}, {-0.4950, 0.8431, 0.3108}, {-0.1959, 0.5153, 1.0961},
         {-0.0498, 0.1991, 2.1633}},
};

// Area under the upper envelope of tangent lines of exp(-q) at `points`,
// by a fine trapezoid rule.
double envelope_area(const std::vector<double>& points) {
    constexpr int steps = 4000;
    const double h = 4.0 / steps;
    auto p = [&](double q) {
        double v = -INFINITY;
        for (double t : points) v = std::max(v, std::exp(-t) * (1.0 - (q - t)));
        return v;
    };
    double area = 0.5 * (p(0.0) + p(4.0));
    for (int s = 1; s < steps; ++s) area += p(s * h);
    return area * h;
}

}  // namespace

TEST_CASE("tangent fit reproduces the published exp(-q) parameters", "[polyline]") {
    const auto f = ScalarCurve::exp_neg({0.0, 4.0});
    for (int pieces = 2; pieces <= 4; ++pieces) {
        CAPTURE(pieces);
        const Polyline p = fit_tangent_polyline(f, pieces, 0.0);
        const auto& rows = kPublished[pieces - 2];
        REQUIRE(p.num_pieces() == rows.size());
        for (std::size_t m = 0; m < rows.size(); ++m) {
            CAPTURE(m);
            CHECK_THAT(p.pieces()[m].slope, WithinAbs(rows[m].a, 1e-3));
            CHECK_THAT(p.pieces()[m].intercept, WithinAbs(rows[m].b, 1e-3));
            CHECK_THAT(p.breakpoints()[m], WithinAbs(rows[m].alpha, 1e-3));
        }
        CHECK(p.breakpoints().back() == 4.0);
    }
}

TEST_CASE("tangent fit matches a grid-search optimum of the residual", "[polyline]") {
    // Last tangency point solves exp(-t)(1 - (4 - t)) = 0, so t = 3.
    double best_area = -INFINITY;
    double best1 = 0.0;
    double best2 = 0.0;
    for (double t1 = 0.05; t1 < 3.0; t1 += 0.05) {
        for (double t2 = t1 + 0.05; t2 < 3.0; t2 += 0.05) {
            const double a = envelope_area({0.0, t1, t2, 3.0});
            if (a > best_area) std::tie(best_area, best1, best2) = std::tie(a, t1, t2);
        }
    }
    const double c1 = best1;
    const double c2 = best2;
    for (double t1 = c1 - 0.05; t1 <= c1 + 0.05; t1 += 0.002) {
        for (double t2 = c2 - 0.05; t2 <= c2 + 0.05; t2 += 0.002) {
            const double a = envelope_area({0.0, t1, t2, 3.0});
            if (a > best_area) std::tie(best_area, best1, best2) = std::tie(a, t1, t2);
        }
    }

    const TangentFit fit = fit_tangent(ScalarCurve::exp_neg({0.0, 4.0}), 4, 0.0);
    REQUIRE(fit.tangent_points.size() == 4);
    CHECK_THAT(fit.tangent_points[3], WithinAbs(3.0, 1e-9));
    CHECK_THAT(fit.tangent_points[1], WithinAbs(best1, 1e-2));
    CHECK_THAT(fit.tangent_points[2], WithinAbs(best2, 1e-2));
    const double exact_area = 1.0 - std::exp(-4.0);
    CHECK(fit.residual <= exact_area - best_area + 1e-6);
    CHECK_THAT(envelope_area(fit.tangent_points), WithinAbs(exact_area - fit.residual, 1e-6));
}

TEST_CASE("tangent fit properties", "[polyline]") {
    for (const auto& f : {ScalarCurve::exp_neg({0.0, 3.0}),
                          ScalarCurve::rational_quadratic(1.0, 1.0, {0.0, 5.0}),
                          ScalarCurve::rational_quadratic(0.5, 2.0, {0.0, 2.0})}) {
        CAPTURE(f.name());
        double previous = INFINITY;
        for (int pieces = 2; pieces <= 6; ++pieces) {
            const TangentFit fit = fit_tangent(f, pieces);
            const auto& bp = fit.polyline.breakpoints();
            CHECK(std::is_sorted(bp.begin(), bp.end()));
            CHECK(fit.polyline.is_continuous());
            CHECK(fit.residual >= -1e-12);
            // The envelope of tangents never exceeds a convex curve.
            for (int s = 0; s <= 200; ++s) {
                const double q = f.domain().lo + f.domain().width() * s / 200.0;
                CHECK(eval_polyline(fit.polyline, q).value <= f(q) + 1e-12);
            }
            // Without y_end, the last line is tangent at the domain end.
            CHECK_THAT(fit.tangent_points.back(), WithinAbs(f.domain().hi, 1e-12));
            const double err = max_grid_error(f, polyline_to_relu(fit.polyline), 2000);
            CHECK(err <= previous + 1e-12);
            previous = err;
        }
    }
}

TEST_CASE("tangent fit rejects unsuitable inputs", "[polyline]") {
    const auto f = ScalarCurve::exp_neg({0.0, 4.0});
    CHECK_THROWS_AS(fit_tangent(ScalarCurve::relu({-1.0, 1.0}), 3), ConvexityError);
    CHECK_THROWS_AS(fit_tangent(f, 3, 0.5), FitFailureError);   // above f(4)
    CHECK_THROWS_AS(fit_tangent(f, 3, -5.0), FitFailureError);  // below the first tangent
    CHECK_THROWS_AS(fit_tangent(f, 1), InvalidConfigError);
}

TEST_CASE("tangent fit of a line is exact", "[polyline]") {
    const auto f = ScalarCurve::linear(-0.5, 2.0, {0.0, 3.0});
    const TangentFit fit = fit_tangent(f, 3);
    CHECK(max_grid_error(f, polyline_to_relu(fit.polyline), 300) < 1e-12);
}

TEST_CASE("spline interpolates uniform knots", "[polyline]") {
    const auto f = ScalarCurve::rational_quadratic(1.0, 1.0, {0.0, 3.0});
    const Polyline p = fit_spline_polyline(f, 5);
    REQUIRE(p.breakpoints().size() == 6);
    for (int m = 0; m <= 5; ++m) {
        const double knot = 3.0 * m / 5.0;
        CHECK_THAT(p.breakpoints()[m], WithinAbs(knot, 1e-15));
        CHECK_THAT(eval_polyline(p, knot).value, WithinAbs(f(knot), 1e-14));
    }
    CHECK(p.is_continuous());
    // Chords of a convex curve lie above it.
    for (int s = 0; s <= 300; ++s) {
        const double q = 3.0 * s / 300.0;
        CHECK(eval_polyline(p, q).value >= f(q) - 1e-14);
    }
}

TEST_CASE("c2 expansion of exp(-q) has closed-form terms", "[polyline]") {
    // delta = 1: base line 1 - q, term m has coefficient exp(-m) at threshold m.
    const ReluExpansion e = c2_relu_expansion(ScalarCurve::exp_neg({0.0, 4.0}), 4);
    CHECK(e.base_slope() == -1.0);
    CHECK(e.base_intercept() == 1.0);
    REQUIRE(e.size() == 4);
    for (int m = 1; m <= 4; ++m) {
        CHECK_THAT(e.terms()[m - 1].coefficient, WithinAbs(std::exp(-m), 1e-15));
        CHECK_THAT(e.terms()[m - 1].threshold, WithinAbs(m, 1e-15));
    }
}

TEST_CASE("c2 expansion converges at first order", "[polyline]") {
    const auto f = ScalarCurve::exp_neg({0.0, 4.0});
    double previous = INFINITY;
    for (int pieces : {8, 16, 32, 64}) {
        const double err = max_grid_error(f, c2_relu_expansion(f, pieces));
        CHECK(err < previous);
        if (std::isfinite(previous)) CHECK(previous / err > 1.8);
        previous = err;
    }
    const ScalarCurve no_second("nd", [](double q) { return std::exp(-q); },
                                [](double q) { return -std::exp(-q); }, {}, {0.0, 1.0},
                                Convexity::general);
    CHECK_THROWS_AS(c2_relu_expansion(no_second, 4), CapabilityError);
}

TEST_CASE("polyline to ReLU re-summation", "[polyline]") {
    testing::Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int pieces = testing::uniform_int(rng, 1, 6);
        std::vector<double> bp{testing::uniform(rng, -2.0, 0.0)};
        for (int m = 0; m < pieces; ++m) bp.push_back(bp.back() + testing::uniform(rng, 0.1, 1.0));
        std::vector<LinePiece> lines{{testing::uniform(rng, -2.0, 2.0), testing::uniform(rng, -1.0, 1.0)}};
        for (int m = 1; m < pieces; ++m) {
            const double slope = testing::uniform(rng, -2.0, 2.0);
            lines.push_back({slope, lines.back()(bp[m]) - slope * bp[m]});
        }
        const Polyline p(lines, bp);
        const ReluExpansion e = polyline_to_relu(p);
        CHECK(e.size() == static_cast<std::size_t>(pieces));
        CHECK_THAT(e.terminal_slope(), WithinAbs(0.0, 1e-12));
        for (int s = 0; s <= 100; ++s) {
            const double q = bp.front() + (bp.back() - bp.front()) * s / 100.0;
            CHECK_THAT(eval_relu(e, q), WithinAbs(eval_polyline(p, q).value, 1e-12));
        }
        // Flat beyond the last breakpoint.
        CHECK_THAT(eval_relu(e, bp.back() + 5.0), WithinAbs(eval_relu(e, bp.back()), 1e-12));
    }
}

TEST_CASE("polyline validation", "[polyline]") {
    CHECK_THROWS_AS(Polyline({}, {0.0}), InvalidPolylineError);
    CHECK_THROWS_AS(Polyline({{1.0, 0.0}}, {0.0, 1.0, 2.0}), InvalidPolylineError);
    CHECK_THROWS_AS(Polyline({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 2.0, 2.0}), InvalidPolylineError);

    const Polyline jump({{1.0, 0.0}, {0.0, 0.0}}, {0.0, 1.0, 2.0});
    CHECK_FALSE(jump.is_continuous());
    CHECK_THAT(jump.max_discontinuity(), WithinAbs(1.0, 1e-15));
    CHECK_THROWS_AS(polyline_to_relu(jump), InvalidPolylineError);

    const Polyline ok({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 1.0, 2.0});
    CHECK(eval_polyline(ok, 3.0).extrapolated);
    CHECK_FALSE(eval_polyline(ok, 1.5).extrapolated);
    CHECK(eval_polyline(ok, -1.0).value == -1.0);
    CHECK_THROWS_AS(ReluExpansion(0.0, 0.0, {{1.0, 1.0}, {1.0, 0.5}}), InvalidPolylineError);
}

}  // namespace reluqubo
