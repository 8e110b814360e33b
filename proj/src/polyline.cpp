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

#include "reluqubo/polyline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "numerics.hpp"

namespace reluqubo {

Polyline::Polyline(std::vector<LinePiece> pieces, std::vector<double> breakpoints)
        : pieces_(std::move(pieces)), breakpoints_(std::move(breakpoints)) {
    if (pieces_.empty()) throw InvalidPolylineError("polyline needs at least one piece");
    if (breakpoints_.size() != pieces_.size() + 1) {
        throw InvalidPolylineError("polyline with " + std::to_string(pieces_.size()) +
                                   " pieces needs " + std::to_string(pieces_.size() + 1) +
                                   " breakpoints, got " + std::to_string(breakpoints_.size()));
    }
    for (std::size_t m = 1; m < breakpoints_.size(); ++m) {
        if (!(breakpoints_[m - 1] < breakpoints_[m])) {
            throw InvalidPolylineError("polyline breakpoints must be strictly increasing (index " +
                                       std::to_string(m) + ")");
        }
    }
}

double Polyline::max_discontinuity() const {
    double worst = 0.0;
    for (std::size_t m = 1; m < pieces_.size(); ++m) {
        const double q = breakpoints_[m];
        worst = std::max(worst, std::abs(pieces_[m](q) - pieces_[m - 1](q)));
    }
    return worst;
}

bool Polyline::is_continuous() const { return max_discontinuity() <= continuity_tolerance; }

PolylineValue eval_polyline(const Polyline& p, double q) {
    const auto& bp = p.breakpoints();
    const auto& pieces = p.pieces();
    if (q < bp.front()) return {pieces.front()(q), true};
    if (q > bp.back()) return {pieces.back()(q), true};
    auto it = std::upper_bound(bp.begin(), bp.end(), q);
    std::size_t m = static_cast<std::size_t>(it - bp.begin());
    m = m == 0 ? 0 : m - 1;
    m = std::min(m, pieces.size() - 1);
    return {pieces[m](q), false};
}

ReluExpansion::ReluExpansion(double base_slope, double base_intercept, std::vector<ReluTerm> terms)
        : base_slope_(base_slope), base_intercept_(base_intercept), terms_(std::move(terms)) {
    for (std::size_t m = 1; m < terms_.size(); ++m) {
        if (!(terms_[m - 1].threshold < terms_[m].threshold)) {
            throw InvalidPolylineError("ReLU thresholds must be strictly increasing");
        }
    }
}

double ReluExpansion::terminal_slope() const {
    double slope = base_slope_;
    for (const auto& t : terms_) slope += t.coefficient;
    return slope;
}

double eval_relu(const ReluExpansion& e, double q) {
    double value = e.base_slope() * q + e.base_intercept();
    for (const auto& t : e.terms()) value += t.coefficient * std::max(0.0, q - t.threshold);
    return value;
}

ReluExpansion polyline_to_relu(const Polyline& p) {
    if (!p.is_continuous()) {
        throw InvalidPolylineError("polyline is discontinuous (jump " +
                                   format_double(p.max_discontinuity()) + ")");
    }
    const auto& pieces = p.pieces();
    const auto& bp = p.breakpoints();
    std::vector<ReluTerm> terms;
    terms.reserve(pieces.size());
    for (std::size_t m = 1; m <= pieces.size(); ++m) {
        const double next_slope = m < pieces.size() ? pieces[m].slope : 0.0;
        terms.push_back(ReluTerm{next_slope - pieces[m - 1].slope, bp[m]});
    }
    return ReluExpansion(pieces.front().slope, pieces.front().intercept, std::move(terms));
}

namespace {

LinePiece tangent_at(const ScalarCurve& f, double t) {
    const double slope = f.derivative(t);
    return {slope, f(t) - t * slope};
}

void require_convex(const ScalarCurve& f) {
    if (f.convexity() != Convexity::downward_convex) {
        throw ConvexityError("tangent fitting needs a downward-convex curve, '" + f.name() +
                             "' is not declared convex");
    }
    const Interval dom = f.domain();
    constexpr int samples = 256;
    for (int s = 0; s <= samples; ++s) {
        const double q = dom.lo + dom.width() * s / samples;
        const double curvature = f.second_derivative(q);
        if (curvature < -1e-8 * std::max(1.0, std::abs(f(q)))) {
            throw ConvexityError("curve '" + f.name() + "' has f''(" + format_double(q) +
                                 ") = " + format_double(curvature) + " < 0");
        }
    }
}

// Consecutive-tangent intersections; parallel tangents meet halfway between
// their tangency points.
std::vector<double> intersections(const std::vector<LinePiece>& lines,
                                  const std::vector<double>& points, Interval dom) {
    std::vector<double> bp(lines.size() + 1);
    bp.front() = dom.lo;
    bp.back() = dom.hi;
    for (std::size_t m = 1; m < lines.size(); ++m) {
        const double da = lines[m].slope - lines[m - 1].slope;
        bp[m] = da == 0.0 ? 0.5 * (points[m - 1] + points[m])
                          : (lines[m - 1].intercept - lines[m].intercept) / da;
    }
    return bp;
}

double area_under(const std::vector<LinePiece>& lines, const std::vector<double>& bp) {
    double area = 0.0;
    for (std::size_t m = 0; m < lines.size(); ++m) {
        const double lo = bp[m];
        const double hi = bp[m + 1];
        area += 0.5 * lines[m].slope * (hi * hi - lo * lo) + lines[m].intercept * (hi - lo);
    }
    return area;
}

}  // namespace

TangentFit fit_tangent(const ScalarCurve& f, int pieces, std::optional<double> y_end) {
    if (pieces < 2) throw InvalidConfigError("tangent fitting needs at least 2 pieces");
    require_convex(f);

    const Interval dom = f.domain();
    const double target = y_end.value_or(f(dom.hi));

    // The tangent at t evaluated at dom.hi increases with t for convex f.
    auto reach = [&](double t) { return tangent_at(f, t)(dom.hi) - target; };
    if (reach(dom.lo) > 1e-12) {
        throw FitFailureError("end value " + format_double(target) +
                              " lies below the tangent at the domain start");
    }
    if (reach(dom.hi) < -1e-12) {
        throw FitFailureError("end value " + format_double(target) +
                              " lies above the curve at the domain end");
    }
    const double last = !y_end || reach(dom.hi) <= 0.0
                                ? dom.hi
                                : detail::bisect_increasing(reach, dom.lo, dom.hi);

    std::vector<double> points(pieces);
    for (int i = 0; i < pieces; ++i) {
        points[i] = dom.lo + (last - dom.lo) * i / (pieces - 1);
    }
    points.back() = last;

    const double curve_area = detail::adaptive_simpson(f, dom.lo, dom.hi, 1e-10);

    std::vector<LinePiece> lines(pieces);
    for (int i = 0; i < pieces; ++i) lines[i] = tangent_at(f, points[i]);

    auto residual = [&](const std::vector<LinePiece>& ls, const std::vector<double>& pts) {
        return curve_area - area_under(ls, intersections(ls, pts, dom));
    };

    int sweeps = 0;
    if (pieces > 2) {
        constexpr int max_sweeps = 5000;
        double previous = residual(lines, points);
        for (sweeps = 1; sweeps <= max_sweeps; ++sweeps) {
            double moved = 0.0;
            for (int i = 1; i + 1 < pieces; ++i) {
                auto objective = [&](double t) {
                    lines[i] = tangent_at(f, t);
                    points[i] = t;
                    return residual(lines, points);
                };
                const double old = points[i];
                const double best =
                        detail::golden_section_minimize(objective, points[i - 1], points[i + 1]);
                const double at_old = objective(old);
                const double at_best = objective(best);
                if (at_best > at_old) objective(old);
                moved = std::max(moved, std::abs(points[i] - old));
            }
            const double current = residual(lines, points);
            const bool stalled = previous - current <= 1e-16 * std::max(1.0, curve_area);
            previous = current;
            if (moved < 1e-10 * std::max(1.0, dom.width()) || (stalled && moved < 1e-7)) break;
        }
    }

    std::vector<double> bp = intersections(lines, points, dom);
    for (std::size_t m = 1; m < bp.size(); ++m) {
        if (!(bp[m - 1] < bp[m])) {
            throw FitFailureError("tangent intersections out of order at breakpoint " +
                                  std::to_string(m));
        }
    }

    TangentFit fit{Polyline(lines, bp), points, 0.0, sweeps};
    for (std::size_t m = 0; m < lines.size(); ++m) {
        const LinePiece line = lines[m];
        fit.residual += detail::adaptive_simpson([&](double q) { return f(q) - line(q); }, bp[m],
                                                 bp[m + 1], 1e-10);
    }
    return fit;
}

Polyline fit_tangent_polyline(const ScalarCurve& f, int pieces, std::optional<double> y_end) {
    return fit_tangent(f, pieces, y_end).polyline;
}

Polyline fit_spline_polyline(const ScalarCurve& f, int pieces) {
    if (pieces < 1) throw InvalidConfigError("spline fitting needs at least 1 piece");
    const Interval dom = f.domain();
    std::vector<double> knots(pieces + 1);
    for (int m = 0; m <= pieces; ++m) knots[m] = dom.lo + dom.width() * m / pieces;
    knots.back() = dom.hi;

    std::vector<LinePiece> lines(pieces);
    for (int m = 0; m < pieces; ++m) {
        const double q0 = knots[m];
        const double q1 = knots[m + 1];
        const double f0 = f(q0);
        const double f1 = f(q1);
        const double slope = (f1 - f0) / (q1 - q0);
        lines[m] = {slope, f0 - slope * q0};
    }
    return Polyline(std::move(lines), std::move(knots));
}

ReluExpansion c2_relu_expansion(const ScalarCurve& f, int pieces) {
    if (pieces < 1) throw InvalidConfigError("C2 expansion needs at least 1 piece");
    if (!f.has_derivative() || !f.has_second_derivative()) {
        throw CapabilityError("C2 expansion of '" + f.name() +
                              "' needs closed-form first and second derivatives");
    }
    const Interval dom = f.domain();
    const double delta = dom.width() / pieces;
    const double slope = f.derivative(dom.lo);
    std::vector<ReluTerm> terms(pieces);
    for (int m = 1; m <= pieces; ++m) {
        const double knot = m == pieces ? dom.hi : dom.lo + delta * m;
        terms[m - 1] = {delta * f.second_derivative(knot), knot};
    }
    return ReluExpansion(slope, f(dom.lo) - dom.lo * slope, std::move(terms));
}

double max_grid_error(const ScalarCurve& f, const ReluExpansion& e, int samples) {
    const Interval dom = f.domain();
    double worst = 0.0;
    for (int s = 0; s <= samples; ++s) {
        const double q = dom.lo + dom.width() * s / samples;
        worst = std::max(worst, std::abs(f(q) - eval_relu(e, q)));
    }
    return worst;
}

}  // namespace reluqubo
