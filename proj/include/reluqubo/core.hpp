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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "reluqubo/exceptions.hpp"

namespace reluqubo {

/// A full binary assignment. Entries are 0 or 1.
using Assignment = std::vector<std::uint8_t>;
using Index = std::size_t;

struct Bounds {
    double min = 0.0;
    double max = 0.0;
};

/// Closed interval [lo, hi] with lo < hi.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double width() const { return hi - lo; }
    bool contains(double q) const { return lo <= q && q <= hi; }
};

/// Affine map q(x) = w.x + offset over binary decision variables.
class LinearForm {
 public:
    LinearForm() = default;
    LinearForm(std::vector<double> weights, double offset)
            : weights_(std::move(weights)), offset_(offset) {}

    std::size_t size() const { return weights_.size(); }
    std::span<const double> weights() const { return weights_; }
    double weight(Index i) const { return weights_[i]; }
    double offset() const { return offset_; }

    /// Evaluate on the first size() entries of x.
    double operator()(std::span<const std::uint8_t> x) const;

    /// Exact min and max over {0,1}^N.
    Bounds value_bounds() const;

    /// True if every weight is zero, so q is constant.
    bool is_constant() const;

 private:
    std::vector<double> weights_;
    double offset_ = 0.0;
};

Bounds linear_form_bounds(const LinearForm& q);

/// Largest step A such that every weight is an integer multiple of A, found
/// among min|w|/d for d = 1..max_denominator. Returns nullopt when no such
/// step exists or when the induced integer range exceeds max_levels.
std::optional<double> detect_lattice_step(const LinearForm& q, int max_denominator = 64,
                                          double max_levels = 1 << 20);

enum class Convexity { downward_convex, general };

/// A scalar nonlinearity f on a closed domain, with optional closed-form
/// derivatives. Missing first derivatives fall back to central differences;
/// a missing second derivative is reported by has_second_derivative().
class ScalarCurve {
 public:
    using Fn = std::function<double(double)>;

    ScalarCurve(std::string name, Fn eval, Fn deriv1, Fn deriv2, Interval domain,
                Convexity convexity);

    /// f(q) = exp(-q).
    static ScalarCurve exp_neg(Interval domain);
    /// f(q) = (1 + q / gamma)^(-gamma_prime).
    static ScalarCurve rational_quadratic(double gamma, double gamma_prime, Interval domain);
    static ScalarCurve linear(double slope, double intercept, Interval domain);
    /// max(0, q); only meaningful for objectives that are already ReLU sums.
    static ScalarCurve relu(Interval domain);

    ScalarCurve with_domain(Interval domain) const;

    double operator()(double q) const { return eval_(q); }
    double derivative(double q) const;
    double second_derivative(double q) const;

    bool has_derivative() const { return static_cast<bool>(deriv1_); }
    bool has_second_derivative() const { return static_cast<bool>(deriv2_); }

    const std::string& name() const { return name_; }
    Interval domain() const { return domain_; }
    Convexity convexity() const { return convexity_; }
    bool is_relu() const { return name_ == "relu"; }

 private:
    std::string name_;
    Fn eval_;
    Fn deriv1_;
    Fn deriv2_;
    Interval domain_;
    Convexity convexity_;
};

enum class VariableKind { decision, dual_t, sign_bit_z, one_hot_s };

std::string to_string(VariableKind kind);
VariableKind variable_kind_from_string(const std::string& text);

/// The (k, m, j) term that introduced an auxiliary variable. Unused indices
/// are -1 (one-hot variables record (k, l) in (k, m)).
struct Origin {
    int k = -1;
    int m = -1;
    int j = -1;

    friend bool operator==(const Origin&, const Origin&) = default;
};

struct VariableEntry {
    std::string label;
    VariableKind kind = VariableKind::decision;
    std::optional<Origin> origin;
};

/// Ordered, label-unique list of QUBO variables. Decision variables come
/// first and occupy indices 0..N-1.
class VariableRegistry {
 public:
    VariableRegistry() = default;

    /// Registers x0..x{n-1}.
    static VariableRegistry with_decisions(std::size_t n);

    Index add(std::string label, VariableKind kind, std::optional<Origin> origin = std::nullopt);

    std::size_t size() const { return entries_.size(); }
    std::size_t num_decisions() const { return num_decisions_; }
    std::size_t num_auxiliary() const { return entries_.size() - num_decisions_; }
    const VariableEntry& operator[](Index i) const { return entries_[i]; }
    const std::vector<VariableEntry>& entries() const { return entries_; }
    std::optional<Index> find(const std::string& label) const;
    std::size_t count(VariableKind kind) const;

 private:
    std::vector<VariableEntry> entries_;
    std::unordered_map<std::string, Index> by_label_;
    std::size_t num_decisions_ = 0;
};

/// Sparse affine expression sum_i coef_i * b_i + constant over registry indices.
struct AffineExpr {
    std::vector<std::pair<Index, double>> terms;
    double constant = 0.0;

    double operator()(std::span<const std::uint8_t> assignment) const;
};

enum class PenaltyKind { one_hot_value, one_hot_count, integer_binarization, real_binarization };

std::string to_string(PenaltyKind kind);
PenaltyKind penalty_kind_from_string(const std::string& text);

/// An equality constraint expr == 0 enforced by the energy term
/// -weight * expr^2. A constraint counts as satisfied when |expr| <= tolerance.
struct PenaltyConstraint {
    PenaltyKind kind = PenaltyKind::one_hot_value;
    Origin origin;
    AffineExpr expr;
    double weight = 0.0;
    double tolerance = 1e-9;

    double residual(std::span<const std::uint8_t> assignment) const {
        return expr(assignment);
    }
    bool satisfied(std::span<const std::uint8_t> assignment) const;
};

struct QuadraticTerm {
    Index i = 0;
    Index j = 0;
    double value = 0.0;
};

/// Maximize constant + linear.b + sum_{i<j} Q_ij b_i b_j over binary b.
///
/// Immutable once constructed. Quadratic terms are stored sorted by (i, j)
/// with i < j; diagonal entries are folded into the linear vector.
class QuboProblem {
 public:
    QuboProblem() = default;

    /// Takes ownership of raw parts. Duplicate (i, j) keys are summed,
    /// (j, i) keys are swapped and diagonal keys are folded into linear.
    QuboProblem(VariableRegistry registry, std::vector<QuadraticTerm> quadratic,
                std::vector<double> linear, double constant,
                std::vector<PenaltyConstraint> penalties = {});

    const VariableRegistry& registry() const { return registry_; }
    std::size_t num_variables() const { return registry_.size(); }
    std::size_t num_decisions() const { return registry_.num_decisions(); }
    std::span<const QuadraticTerm> quadratic() const { return quadratic_; }
    std::span<const double> linear() const { return linear_; }
    double constant() const { return constant_; }
    std::span<const PenaltyConstraint> penalties() const { return penalties_; }

    /// Q_ij for any order of i, j; zero if absent.
    double quadratic(Index i, Index j) const;

 private:
    VariableRegistry registry_;
    std::vector<QuadraticTerm> quadratic_;
    std::vector<double> linear_;
    double constant_ = 0.0;
    std::vector<PenaltyConstraint> penalties_;
};

double evaluate_qubo(const QuboProblem& problem, std::span<const std::uint8_t> assignment);

/// Accumulates energy terms and variables, then freezes into a QuboProblem.
class QuboBuilder {
 public:
    explicit QuboBuilder(std::size_t num_decisions);

    Index add_variable(std::string label, VariableKind kind, std::optional<Origin> origin);

    void add_constant(double value) { constant_ += value; }
    void add_linear(Index i, double value);
    void add_quadratic(Index i, Index j, double value);

    /// Adds scale * expr.
    void add_affine(const AffineExpr& expr, double scale);
    /// Adds scale * b_v * expr(b).
    void add_variable_times(Index v, const AffineExpr& expr, double scale);
    /// Adds scale * expr(b)^2.
    void add_square(const AffineExpr& expr, double scale);
    /// Adds -weight * expr^2 and records the constraint.
    void add_penalty(PenaltyKind kind, Origin origin, AffineExpr expr, double weight,
                     double tolerance = 1e-9);

    const VariableRegistry& registry() const { return registry_; }

    QuboProblem build() &&;

 private:
    VariableRegistry registry_;
    std::vector<double> linear_;
    std::unordered_map<std::uint64_t, double> quadratic_;
    double constant_ = 0.0;
    std::vector<PenaltyConstraint> penalties_;
};

/// Affine expression over decision variables 0..N-1 equal to q(x).
AffineExpr to_affine(const LinearForm& q);

/// Text export: `qubo maximize <n>`, `var`, `lin`, `quad`, `const` lines,
/// values printed with 17 significant digits.
void write_qubo_text(std::ostream& out, const QuboProblem& problem);
QuboProblem read_qubo_text(std::istream& in);

std::string format_double(double value);

}  // namespace reluqubo
