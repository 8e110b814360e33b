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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reluqubo/core.hpp"
#include "reluqubo/models.hpp"
#include "reluqubo/polyline.hpp"

namespace reluqubo {

enum class FitStrategy { tangent, spline, c2 };
enum class Method { discretization, relu, mixed };

std::string to_string(FitStrategy strategy);
std::string to_string(Method method);
FitStrategy fit_strategy_from_string(const std::string& text);
Method method_from_string(const std::string& text);

struct ReluQuadratizeConfig {
    int pieces = 4;
    FitStrategy strategy = FitStrategy::tangent;
    double penalty_scale = 2.0;
    /// Problem-wide sign-bit width D. Must cover every integer-binarized term.
    std::optional<int> bits;
    /// Tangent fits only: value the last tangent passes through at the domain end.
    std::optional<double> y_end;
    /// Default D when some term needs real-valued binarization.
    int real_bits = 8;

    void validate() const;
};

struct DiscretizeConfig {
    std::optional<double> lambda;
    std::optional<double> lambda_prime;
    std::map<int, double> lambda_overrides;
    std::map<int, double> lambda_prime_overrides;
    double penalty_scale = 2.0;

    void validate() const;
};

/// A ReLU term (k, m) of the expanded objective, m counted from 1.
struct TermIndex {
    int k = 0;
    int m = 0;

    friend bool operator==(const TermIndex&, const TermIndex&) = default;
    friend auto operator<=>(const TermIndex&, const TermIndex&) = default;
};

/// Partition of nonzero ReLU terms by the sign of c_k (a_m - a_{m-1}).
struct SignSplit {
    std::vector<TermIndex> delta_p;
    std::vector<TermIndex> delta_n;

    /// Number of distinct k with at least one term in the set.
    std::size_t positive_terms() const;
    std::size_t negative_terms() const;
};

/// Smallest D >= 0 with 1 - 2^D <= q_min - floor(alpha) and
/// q_max - floor(alpha) <= 2^D. nullopt when q_min == q_max.
std::optional<int> bit_width(double q_min, double q_max, double alpha);

/// Sign-bit encoding of an integer-valued quantity u relative to threshold
/// alpha: u - floor(alpha) = 1 - 2^D + sum_{j=0}^{D} 2^j z_j.
struct IntegerBinarization {
    std::vector<Index> bits;  // z_0..z_D
    /// u - floor(alpha) - (1 - 2^D + sum 2^j z_j), in units of u.
    AffineExpr equality;
    double floor_alpha = 0.0;
};

/// `u` is an affine expression with integer values; `alpha` in the same units.
IntegerBinarization binarize_integer(QuboBuilder& builder, const AffineExpr& u, double alpha,
                                     int bits, Origin origin);

/// Grid encoding q = scale (1 - 2^D + sum 2^j z_j) for real-valued q.
struct RealBinarization {
    std::vector<Index> bits;
    double scale = 0.0;
    /// q / scale - (1 - 2^D + sum 2^j z_j), in grid units.
    AffineExpr equality;
    /// min q >= 0 or max q <= 0: the ReLU is linear on the attainable range.
    bool trivial = false;
};

/// scale = max(|max q| / 2^D, |min q| / (2^D - 1)).
double real_binarization_scale(Bounds q, int bits);

RealBinarization binarize_real(QuboBuilder& builder, const AffineExpr& q, Bounds range, int bits,
                               Origin origin);

/// How one ReLU term (k, m) was encoded.
struct ReluTermEncoding {
    enum class Kind { dual, sign_integer, sign_real };

    TermIndex index;
    Kind kind = Kind::dual;
    double coefficient = 0.0;  // c_k (a_m - a_{m-1})
    double threshold = 0.0;    // alpha_m
    std::vector<Index> variables;
    /// Lattice step A (sign_integer) or grid scale (sign_real).
    double unit = 0.0;
    double lambda = 0.0;
    /// q_k(x) - alpha_m is exactly zero for some attainable x.
    bool zero_crossing = false;
};

std::string to_string(ReluTermEncoding::Kind kind);

/// One-hot encoding of term k over its value levels.
struct DiscreteTermEncoding {
    int k = 0;
    std::vector<Index> variables;
    std::vector<double> levels;
    double step = 0.0;
    double lambda = 0.0;
    double lambda_prime = 0.0;
};

/// A compiled QUBO plus everything needed to audit it.
struct Compilation {
    Method method = Method::relu;
    CanonicalObjective objective;
    QuboProblem problem;
    SignSplit split;
    /// Per canonical term; empty for discretized terms.
    std::vector<std::optional<ReluExpansion>> expansions;
    /// Per canonical term; set when a polyline was fitted.
    std::vector<std::optional<Polyline>> polylines;
    std::vector<ReluTermEncoding> relu_terms;
    std::vector<DiscreteTermEncoding> discrete_terms;
    /// sum_k c_k b_0 over ReLU-method terms, omitted from the QUBO.
    double dropped_constant = 0.0;
    /// Problem-wide sign-bit width, when any negative ReLU term exists.
    std::optional<int> bits;
    /// Largest |q - grid| over real-binarized terms, in q units.
    double representation_error = 0.0;
    std::vector<std::string> warnings;

    /// Objective the QUBO approximates: f-hat for ReLU-method terms, f for
    /// discretized terms, plus the model constant.
    double surrogate(std::span<const std::uint8_t> x) const;
    /// surrogate(x) - dropped_constant: the intended max over auxiliaries.
    double qubo_target(std::span<const std::uint8_t> x) const;
};

/// Fits f-hat for every term per the config (or reuses the ReLU for
/// already-ReLU objectives). Entries are shared between equal curves.
std::vector<ReluExpansion> fit_expansions(const CanonicalObjective& obj,
                                          const ReluQuadratizeConfig& cfg,
                                          std::vector<std::optional<Polyline>>* polylines = nullptr);

SignSplit sign_split(const CanonicalObjective& obj, const std::vector<ReluExpansion>& expansions);

Compilation quadratize_relu_method(const CanonicalObjective& obj, const ReluQuadratizeConfig& cfg);
Compilation quadratize_discretization(const CanonicalObjective& obj, const DiscretizeConfig& cfg);
Compilation quadratize_mixed(const CanonicalObjective& obj, const ReluQuadratizeConfig& rcfg,
                             const DiscretizeConfig& dcfg);

Compilation quadratize(const CanonicalObjective& obj, Method method,
                       const ReluQuadratizeConfig& rcfg = {}, const DiscretizeConfig& dcfg = {});

/// Default lambda_{k,m} = scale |coef| (|q_max - alpha| + |q_min - alpha|).
double default_relu_lambda(double coefficient, Bounds q, double alpha, double penalty_scale);
/// Default lambda_k = lambda'_k = scale |c_k| max_l |f(d_l)|.
double default_discrete_lambda(double coefficient, std::span<const double> curve_values,
                               double penalty_scale);

}  // namespace reluqubo
