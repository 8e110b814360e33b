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

#include "reluqubo/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace reluqubo {

namespace {

std::uint64_t pack(Index i, Index j) {
    return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
}

std::vector<std::pair<Index, double>> merged_terms(const AffineExpr& expr) {
    std::map<Index, double> acc;
    for (const auto& [i, c] : expr.terms) acc[i] += c;
    std::vector<std::pair<Index, double>> out;
    out.reserve(acc.size());
    for (const auto& [i, c] : acc) {
        if (c != 0.0) out.emplace_back(i, c);
    }
    return out;
}

}  // namespace

double LinearForm::operator()(std::span<const std::uint8_t> x) const {
    if (x.size() < weights_.size()) {
        throw DimensionError("linear form of size " + std::to_string(weights_.size()) +
                             " evaluated on " + std::to_string(x.size()) + " values");
    }
    double value = offset_;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (x[i]) value += weights_[i];
    }
    return value;
}

Bounds LinearForm::value_bounds() const {
    Bounds b{offset_, offset_};
    for (double w : weights_) {
        b.min += std::min(w, 0.0);
        b.max += std::max(w, 0.0);
    }
    return b;
}

bool LinearForm::is_constant() const {
    return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w == 0.0; });
}

Bounds linear_form_bounds(const LinearForm& q) { return q.value_bounds(); }

std::optional<double> detect_lattice_step(const LinearForm& q, int max_denominator,
                                          double max_levels) {
    double smallest = 0.0;
    for (double w : q.weights()) {
        double a = std::abs(w);
        if (a > 0.0 && (smallest == 0.0 || a < smallest)) smallest = a;
    }
    if (smallest == 0.0) return std::nullopt;

    for (int d = 1; d <= max_denominator; ++d) {
        const double step = smallest / d;
        double levels = 0.0;
        bool ok = true;
        for (double w : q.weights()) {
            const double ratio = w / step;
            const double rounded = std::round(ratio);
            if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio))) {
                ok = false;
                break;
            }
            levels += std::abs(rounded);
        }
        if (ok) {
            if (levels > max_levels) return std::nullopt;
            return step;
        }
    }
    return std::nullopt;
}

// ScalarCurve

ScalarCurve::ScalarCurve(std::string name, Fn eval, Fn deriv1, Fn deriv2, Interval domain,
                         Convexity convexity)
        : name_(std::move(name)),
          eval_(std::move(eval)),
          deriv1_(std::move(deriv1)),
          deriv2_(std::move(deriv2)),
          domain_(domain),
          convexity_(convexity) {
    if (!eval_) throw Error("curve '" + name_ + "' has no evaluation function");
    if (!(domain_.lo < domain_.hi)) {
        throw Error("curve '" + name_ + "' needs a nonempty domain, got [" +
                    format_double(domain_.lo) + ", " + format_double(domain_.hi) + "]");
    }
    if (convexity_ == Convexity::downward_convex && deriv2_) {
        constexpr int samples = 256;
        for (int s = 0; s <= samples; ++s) {
            const double q = domain_.lo + domain_.width() * s / samples;
            if (deriv2_(q) < 0.0) {
                throw ConvexityError("curve '" + name_ + "' declared downward convex but f''(" +
                                     format_double(q) + ") < 0");
            }
        }
    }
}

ScalarCurve ScalarCurve::exp_neg(Interval domain) {
    return ScalarCurve(
            "exp_neg", [](double q) { return std::exp(-q); },
            [](double q) { return -std::exp(-q); }, [](double q) { return std::exp(-q); },
            domain, Convexity::downward_convex);
}

ScalarCurve ScalarCurve::rational_quadratic(double gamma, double gamma_prime, Interval domain) {
    if (!(gamma > 0.0) || !(gamma_prime > 0.0)) {
        throw Error("rational quadratic kernel needs gamma > 0 and gamma' > 0");
    }
    if (domain.lo <= -gamma) {
        throw Error("rational quadratic kernel is undefined for q <= -gamma");
    }
    auto f = [gamma, gamma_prime](double q) { return std::pow(1.0 + q / gamma, -gamma_prime); };
    auto d1 = [gamma, gamma_prime](double q) {
        return -gamma_prime / gamma * std::pow(1.0 + q / gamma, -gamma_prime - 1.0);
    };
    auto d2 = [gamma, gamma_prime](double q) {
        return gamma_prime * (gamma_prime + 1.0) / (gamma * gamma) *
               std::pow(1.0 + q / gamma, -gamma_prime - 2.0);
    };
    std::ostringstream name;
    name << "rational_quadratic(" << format_double(gamma) << "," << format_double(gamma_prime)
         << ")";
    return ScalarCurve(name.str(), f, d1, d2, domain, Convexity::downward_convex);
}

ScalarCurve ScalarCurve::linear(double slope, double intercept, Interval domain) {
    return ScalarCurve(
            "linear", [slope, intercept](double q) { return slope * q + intercept; },
            [slope](double) { return slope; }, [](double) { return 0.0; }, domain,
            Convexity::downward_convex);
}

ScalarCurve ScalarCurve::relu(Interval domain) {
    return ScalarCurve(
            "relu", [](double q) { return std::max(q, 0.0); },
            [](double q) { return q > 0.0 ? 1.0 : 0.0; }, Fn{}, domain, Convexity::general);
}

ScalarCurve ScalarCurve::with_domain(Interval domain) const {
    return ScalarCurve(name_, eval_, deriv1_, deriv2_, domain, convexity_);
}

double ScalarCurve::derivative(double q) const {
    if (deriv1_) return deriv1_(q);
    const double h = 1e-5 * std::max(1.0, std::abs(q));
    return (eval_(q + h) - eval_(q - h)) / (2.0 * h);
}

double ScalarCurve::second_derivative(double q) const {
    if (deriv2_) return deriv2_(q);
    const double h = 1e-4 * std::max(1.0, std::abs(q));
    return (eval_(q + h) - 2.0 * eval_(q) + eval_(q - h)) / (h * h);
}

// Registry

std::string to_string(VariableKind kind) {
    switch (kind) {
        case VariableKind::decision:
            return "decision";
        case VariableKind::dual_t:
            return "dual_t";
        case VariableKind::sign_bit_z:
            return "sign_bit_z";
        case VariableKind::one_hot_s:
            return "one_hot_s";
    }
    return "unknown";
}

VariableKind variable_kind_from_string(const std::string& text) {
    if (text == "decision") return VariableKind::decision;
    if (text == "dual_t") return VariableKind::dual_t;
    if (text == "sign_bit_z") return VariableKind::sign_bit_z;
    if (text == "one_hot_s") return VariableKind::one_hot_s;
    throw ParseError("unknown variable kind '" + text + "'");
}

VariableRegistry VariableRegistry::with_decisions(std::size_t n) {
    VariableRegistry registry;
    for (std::size_t i = 0; i < n; ++i) {
        registry.add("x" + std::to_string(i), VariableKind::decision);
    }
    return registry;
}

Index VariableRegistry::add(std::string label, VariableKind kind, std::optional<Origin> origin) {
    if (kind == VariableKind::decision && num_decisions_ != entries_.size()) {
        throw Error("decision variable '" + label + "' registered after auxiliary variables");
    }
    if (kind != VariableKind::decision && !origin) {
        throw Error("auxiliary variable '" + label + "' needs an origin");
    }
    if (by_label_.count(label)) throw Error("duplicate variable label '" + label + "'");
    const Index index = entries_.size();
    by_label_.emplace(label, index);
    entries_.push_back(VariableEntry{std::move(label), kind, origin});
    if (kind == VariableKind::decision) ++num_decisions_;
    return index;
}

std::optional<Index> VariableRegistry::find(const std::string& label) const {
    auto it = by_label_.find(label);
    if (it == by_label_.end()) return std::nullopt;
    return it->second;
}

std::size_t VariableRegistry::count(VariableKind kind) const {
    return static_cast<std::size_t>(std::count_if(
            entries_.begin(), entries_.end(), [kind](const auto& e) { return e.kind == kind; }));
}

// Penalties

double AffineExpr::operator()(std::span<const std::uint8_t> assignment) const {
    double value = constant;
    for (const auto& [i, c] : terms) {
        if (i >= assignment.size()) {
            throw DimensionError("expression references variable " + std::to_string(i) +
                                 " beyond assignment of size " +
                                 std::to_string(assignment.size()));
        }
        if (assignment[i]) value += c;
    }
    return value;
}

std::string to_string(PenaltyKind kind) {
    switch (kind) {
        case PenaltyKind::one_hot_value:
            return "one_hot_value";
        case PenaltyKind::one_hot_count:
            return "one_hot_count";
        case PenaltyKind::integer_binarization:
            return "integer_binarization";
        case PenaltyKind::real_binarization:
            return "real_binarization";
    }
    return "unknown";
}

PenaltyKind penalty_kind_from_string(const std::string& text) {
    if (text == "one_hot_value") return PenaltyKind::one_hot_value;
    if (text == "one_hot_count") return PenaltyKind::one_hot_count;
    if (text == "integer_binarization") return PenaltyKind::integer_binarization;
    if (text == "real_binarization") return PenaltyKind::real_binarization;
    throw ParseError("unknown penalty kind '" + text + "'");
}

bool PenaltyConstraint::satisfied(std::span<const std::uint8_t> assignment) const {
    return std::abs(expr(assignment)) <= tolerance;
}

// QuboProblem

QuboProblem::QuboProblem(VariableRegistry registry, std::vector<QuadraticTerm> quadratic,
                         std::vector<double> linear, double constant,
                         std::vector<PenaltyConstraint> penalties)
        : registry_(std::move(registry)),
          linear_(std::move(linear)),
          constant_(constant),
          penalties_(std::move(penalties)) {
    const std::size_t n = registry_.size();
    if (linear_.size() != n) {
        throw DimensionError("linear vector has " + std::to_string(linear_.size()) +
                             " entries for " + std::to_string(n) + " variables");
    }
    std::map<std::pair<Index, Index>, double> acc;
    for (auto [i, j, v] : quadratic) {
        if (i >= n || j >= n) {
            throw DimensionError("quadratic term (" + std::to_string(i) + ", " +
                                 std::to_string(j) + ") outside " + std::to_string(n) +
                                 " variables");
        }
        if (i == j) {
            linear_[i] += v;
            continue;
        }
        if (i > j) std::swap(i, j);
        acc[{i, j}] += v;
    }
    quadratic_.reserve(acc.size());
    for (const auto& [key, v] : acc) {
        if (v != 0.0) quadratic_.push_back(QuadraticTerm{key.first, key.second, v});
    }
    for (const auto& p : penalties_) {
        for (const auto& [i, c] : p.expr.terms) {
            if (i >= n) throw DimensionError("penalty references unknown variable");
        }
    }
}

double QuboProblem::quadratic(Index i, Index j) const {
    if (i > j) std::swap(i, j);
    auto it = std::lower_bound(
            quadratic_.begin(), quadratic_.end(), std::make_pair(i, j),
            [](const QuadraticTerm& t, const std::pair<Index, Index>& key) {
                return std::make_pair(t.i, t.j) < key;
            });
    if (it != quadratic_.end() && it->i == i && it->j == j) return it->value;
    return 0.0;
}

double evaluate_qubo(const QuboProblem& problem, std::span<const std::uint8_t> assignment) {
    if (assignment.size() != problem.num_variables()) {
        throw DimensionError("assignment has " + std::to_string(assignment.size()) +
                             " entries, problem has " +
                             std::to_string(problem.num_variables()) + " variables");
    }
    double value = problem.constant();
    const auto linear = problem.linear();
    for (std::size_t i = 0; i < linear.size(); ++i) {
        if (assignment[i]) value += linear[i];
    }
    for (const auto& t : problem.quadratic()) {
        if (assignment[t.i] && assignment[t.j]) value += t.value;
    }
    return value;
}

// Builder

QuboBuilder::QuboBuilder(std::size_t num_decisions)
        : registry_(VariableRegistry::with_decisions(num_decisions)),
          linear_(num_decisions, 0.0) {}

Index QuboBuilder::add_variable(std::string label, VariableKind kind,
                                std::optional<Origin> origin) {
    const Index index = registry_.add(std::move(label), kind, origin);
    linear_.push_back(0.0);
    return index;
}

void QuboBuilder::add_linear(Index i, double value) { linear_.at(i) += value; }

void QuboBuilder::add_quadratic(Index i, Index j, double value) {
    if (i >= linear_.size() || j >= linear_.size()) {
        throw DimensionError("quadratic term references unknown variable");
    }
    if (i == j) {
        linear_[i] += value;
        return;
    }
    if (i > j) std::swap(i, j);
    quadratic_[pack(i, j)] += value;
}

void QuboBuilder::add_affine(const AffineExpr& expr, double scale) {
    constant_ += scale * expr.constant;
    for (const auto& [i, c] : expr.terms) add_linear(i, scale * c);
}

void QuboBuilder::add_variable_times(Index v, const AffineExpr& expr, double scale) {
    add_linear(v, scale * expr.constant);
    for (const auto& [i, c] : expr.terms) add_quadratic(v, i, scale * c);
}

void QuboBuilder::add_square(const AffineExpr& expr, double scale) {
    const auto terms = merged_terms(expr);
    const double c0 = expr.constant;
    constant_ += scale * c0 * c0;
    for (std::size_t a = 0; a < terms.size(); ++a) {
        const auto [i, ci] = terms[a];
        add_linear(i, scale * (ci * ci + 2.0 * c0 * ci));
        for (std::size_t b = a + 1; b < terms.size(); ++b) {
            const auto [j, cj] = terms[b];
            add_quadratic(i, j, scale * 2.0 * ci * cj);
        }
    }
}

void QuboBuilder::add_penalty(PenaltyKind kind, Origin origin, AffineExpr expr, double weight,
                              double tolerance) {
    expr.terms = merged_terms(expr);
    add_square(expr, -weight);
    penalties_.push_back(PenaltyConstraint{kind, origin, std::move(expr), weight, tolerance});
}

QuboProblem QuboBuilder::build() && {
    std::vector<QuadraticTerm> quadratic;
    quadratic.reserve(quadratic_.size());
    for (const auto& [key, v] : quadratic_) {
        quadratic.push_back(QuadraticTerm{static_cast<Index>(key >> 32),
                                          static_cast<Index>(key & 0xffffffffu), v});
    }
    return QuboProblem(std::move(registry_), std::move(quadratic), std::move(linear_), constant_,
                       std::move(penalties_));
}

AffineExpr to_affine(const LinearForm& q) {
    AffineExpr expr;
    expr.constant = q.offset();
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q.weight(i) != 0.0) expr.terms.emplace_back(i, q.weight(i));
    }
    return expr;
}

// Text format

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_qubo_text(std::ostream& out, const QuboProblem& problem) {
    const auto& registry = problem.registry();
    out << "qubo maximize " << registry.size() << '\n';
    for (Index i = 0; i < registry.size(); ++i) {
        out << "var " << i << ' ' << registry[i].label << ' ' << to_string(registry[i].kind)
            << '\n';
    }
    const auto linear = problem.linear();
    for (Index i = 0; i < linear.size(); ++i) {
        if (linear[i] != 0.0) out << "lin " << i << ' ' << format_double(linear[i]) << '\n';
    }
    for (const auto& t : problem.quadratic()) {
        out << "quad " << t.i << ' ' << t.j << ' ' << format_double(t.value) << '\n';
    }
    out << "const " << format_double(problem.constant()) << '\n';
}

namespace {

// Recovers (k, m[, j]) from labels such as "z[0,2,1]".
std::optional<Origin> origin_from_label(const std::string& label, VariableKind kind) {
    if (kind == VariableKind::decision) return std::nullopt;
    const auto open = label.find('[');
    const auto close = label.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw ParseError("auxiliary label '" + label + "' does not encode its origin");
    }
    std::vector<int> parts;
    std::stringstream ss(label.substr(open + 1, close - open - 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            parts.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ParseError("auxiliary label '" + label + "' has a non-integer index");
        }
    }
    if (parts.size() < 2 || parts.size() > 3) {
        throw ParseError("auxiliary label '" + label + "' needs 2 or 3 indices");
    }
    Origin origin{parts[0], parts[1], parts.size() == 3 ? parts[2] : -1};
    return origin;
}

}  // namespace

QuboProblem read_qubo_text(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&line_no](const std::string& what) {
        throw ParseError("qubo text line " + std::to_string(line_no) + ": " + what);
    };

    std::size_t n = 0;
    bool header = false;
    VariableRegistry registry;
    std::vector<double> linear;
    std::vector<QuadraticTerm> quadratic;
    double constant = 0.0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (!header) {
            std::string sense;
            if (tag != "qubo" || !(ls >> sense >> n) || sense != "maximize") {
                fail("expected header 'qubo maximize <num_vars>'");
            }
            header = true;
            linear.assign(n, 0.0);
            continue;
        }
        if (tag == "var") {
            Index i;
            std::string label, kind;
            if (!(ls >> i >> label >> kind)) fail("malformed var line");
            if (i != registry.size()) fail("var lines must be listed in index order");
            const auto vk = variable_kind_from_string(kind);
            registry.add(label, vk, origin_from_label(label, vk));
        } else if (tag == "lin") {
            Index i;
            double v;
            if (!(ls >> i >> v) || i >= n) fail("malformed lin line");
            linear[i] += v;
        } else if (tag == "quad") {
            Index i, j;
            double v;
            if (!(ls >> i >> j >> v) || i >= n || j >= n) fail("malformed quad line");
            quadratic.push_back(QuadraticTerm{i, j, v});
        } else if (tag == "const") {
            double v;
            if (!(ls >> v)) fail("malformed const line");
            constant += v;
        } else {
            fail("unknown line tag '" + tag + "'");
        }
    }
    if (!header) throw ParseError("qubo text: missing header");
    if (registry.size() != n) {
        throw ParseError("qubo text: header declares " + std::to_string(n) + " variables, found " +
                         std::to_string(registry.size()) + " var lines");
    }
    return QuboProblem(std::move(registry), std::move(quadratic), std::move(linear), constant);
}

}  // namespace reluqubo
