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

#pragma once

#include <optional>
#include <vector>

#include "reluqubo/core.hpp"

namespace reluqubo {

struct LinePiece {
    double slope = 0.0;
    double intercept = 0.0;

    double operator()(double q) const { return slope * q + intercept; }
};

/// Continuous piecewise-linear function on [breakpoints.front(), breakpoints.back()].
///
/// Piece m is active on [breakpoints[m], breakpoints[m+1]). The constructor
/// checks shape and ordering; continuity is checked by is_continuous() and
/// enforced where a ReLU rewrite depends on it.
class Polyline {
 public:
    static constexpr double continuity_tolerance = 1e-9;

    Polyline(std::vector<LinePiece> pieces, std::vector<double> breakpoints);

    std::size_t num_pieces() const { return pieces_.size(); }
    const std::vector<LinePiece>& pieces() const { return pieces_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    Interval domain() const { return {breakpoints_.front(), breakpoints_.back()}; }

    /// Largest jump |a_m alpha_m + b_m - (a_{m-1} alpha_m + b_{m-1})| over interior breakpoints.
    double max_discontinuity() const;
    bool is_continuous() const;

 private:
    std::vector<LinePiece> pieces_;
    std::vector<double> breakpoints_;
};

struct PolylineValue {
    double value = 0.0;
    /// q was outside the domain; the nearest end piece was extended.
    bool extrapolated = false;
};

PolylineValue eval_polyline(const Polyline& p, double q);

struct ReluTerm {
    double coefficient = 0.0;
    double threshold = 0.0;
};

/// f(q) = base_slope * q + base_intercept + sum_m coefficient_m * max(0, q - threshold_m).
class ReluExpansion {
 public:
    ReluExpansion(double base_slope, double base_intercept, std::vector<ReluTerm> terms);

    double base_slope() const { return base_slope_; }
    double base_intercept() const { return base_intercept_; }
    const std::vector<ReluTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    /// Slope after the last threshold. Zero for expansions built from a polyline.
    double terminal_slope() const;

 private:
    double base_slope_;
    double base_intercept_;
    std::vector<ReluTerm> terms_;
};

double eval_relu(const ReluExpansion& e, double q);

/// Rewrites a continuous polyline as a base line plus one ReLU per breakpoint
/// alpha_1..alpha_M, with a_M = 0 so the expansion is flat past the domain.
/// Throws InvalidPolylineError if the polyline is not continuous.
ReluExpansion polyline_to_relu(const Polyline& p);

struct TangentFit {
    Polyline polyline;
    /// Tangency points t_0 < ... < t_{M-1}; t_0 is the domain start.
    std::vector<double> tangent_points;
    /// Integral of f - polyline over the domain (nonnegative for convex f).
    double residual = 0.0;
    int sweeps = 0;
};

/// Polyline of M tangent lines to a downward-convex curve.
///
/// The first line is tangent at the domain start and the last is the tangent
/// passing through (domain end, y_end); y_end defaults to f(domain end). The
/// M-2 interior tangency points minimize the integrated residual
/// int (f - p) dq by coordinate descent with golden-section line searches.
TangentFit fit_tangent(const ScalarCurve& f, int pieces, std::optional<double> y_end = std::nullopt);

Polyline fit_tangent_polyline(const ScalarCurve& f, int pieces,
                              std::optional<double> y_end = std::nullopt);

/// Linear interpolation of f on M uniform knot intervals.
Polyline fit_spline_polyline(const ScalarCurve& f, int pieces);

/// Quadrature form of the second-order Taylor remainder:
/// base = (f'(a0), f(a0) - a0 f'(a0)), term m = (delta f''(a0 + delta m), a0 + delta m).
ReluExpansion c2_relu_expansion(const ScalarCurve& f, int pieces);

/// Maximum of |f - g| on a uniform grid of `samples` + 1 points over f's domain.
double max_grid_error(const ScalarCurve& f, const ReluExpansion& e, int samples = 20000);

}  // namespace reluqubo
