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

#include "reluqubo/quadratize.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace reluqubo {

namespace {

constexpr double kIntegerTolerance = 1e-9;
// Exhaustive scans over x (zero crossings, representation error) stop here.
constexpr std::size_t kMaxScanDimension = 20;

std::string term_label(char prefix, int k, int m) {
    return std::string(1, prefix) + "[" + std::to_string(k) + "," + std::to_string(m) + "]";
}

std::string bit_label(int k, int m, int j) {
    return "z[" + std::to_string(k) + "," + std::to_string(m) + "," + std::to_string(j) + "]";
}

AffineExpr shifted(AffineExpr e, double delta) {
    e.constant += delta;
    return e;
}

AffineExpr scaled(AffineExpr e, double factor) {
    for (auto& [i, c] : e.terms) c *= factor;
    e.constant *= factor;
    return e;
}

// u(x) = (q(x) - q_min) / A, integer valued in [0, levels - 1]. Coefficients
// are rounded to the integers they approximate so residuals vanish exactly.
AffineExpr lattice_units(const LinearForm& q, Bounds bounds, double step) {
    AffineExpr u = scaled(shifted(to_affine(q), -bounds.min), 1.0 / step);
    auto snap = [](double v) { return std::abs(v - std::round(v)) <= 1e-6 ? std::round(v) : v; };
    for (auto& [i, c] : u.terms) c = snap(c);
    u.constant = snap(u.constant);
    return u;
}

long long lattice_levels(Bounds bounds, double step) {
    return std::llround((bounds.max - bounds.min) / step);
}

bool near_integer(double v) { return std::abs(v - std::round(v)) <= kIntegerTolerance; }

template <class F>
void for_each_assignment(std::size_t n, F&& visit) {
    Assignment x(n, 0);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t code = 0; code < total; ++code) {
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((code >> i) & 1u);
        visit(std::span<const std::uint8_t>(x));
    }
}

}  // namespace

std::string to_string(FitStrategy strategy) {
    switch (strategy) {
        case FitStrategy::tangent:
            return "tangent";
        case FitStrategy::spline:
            return "spline";
        case FitStrategy::c2:
            return "c2";
    }
    return "unknown";
}

std::string to_string(Method method) {
    switch (method) {
        case Method::discretization:
            return "disc";
        case Method::relu:
            return "relu";
        case Method::mixed:
            return "mixed";
    }
    return "unknown";
}

FitStrategy fit_strategy_from_string(const std::string& text) {
    if (text == "tangent") return FitStrategy::tangent;
    if (text == "spline") return FitStrategy::spline;
    if (text == "c2") return FitStrategy::c2;
    throw InvalidConfigError("unknown fit strategy '" + text + "' (tangent, spline, c2)");
}

Method method_from_string(const std::string& text) {
    if (text == "disc" || text == "discretization") return Method::discretization;
    if (text == "relu") return Method::relu;
    if (text == "mixed") return Method::mixed;
    throw InvalidConfigError("unknown method '" + text + "' (disc, relu, mixed)");
}

std::string to_string(ReluTermEncoding::Kind kind) {
    switch (kind) {
        case ReluTermEncoding::Kind::dual:
            return "dual";
        case ReluTermEncoding::Kind::sign_integer:
            return "sign_integer";
        case ReluTermEncoding::Kind::sign_real:
            return "sign_real";
    }
    return "unknown";
}

void ReluQuadratizeConfig::validate() const {
    if (pieces < 1) throw InvalidConfigError("pieces must be at least 1");
    if (strategy == FitStrategy::tangent && pieces < 2) {
        throw InvalidConfigError("tangent fitting needs at least 2 pieces");
    }
    if (!(penalty_scale > 0.0)) throw InvalidConfigError("penalty scale must be positive");
    if (bits && (*bits < 0 || *bits > 52)) throw InvalidConfigError("bits must be in [0, 52]");
    if (real_bits < 1 || real_bits > 52) throw InvalidConfigError("real bits must be in [1, 52]");
}

void DiscretizeConfig::validate() const {
    if (!(penalty_scale > 0.0)) throw InvalidConfigError("penalty scale must be positive");
    auto positive = [](std::optional<double> v) { return !v || *v > 0.0; };
    if (!positive(lambda) || !positive(lambda_prime)) {
        throw InvalidConfigError("discretization penalties must be positive");
    }
    for (const auto* overrides : {&lambda_overrides, &lambda_prime_overrides}) {
        for (const auto& [k, v] : *overrides) {
            if (!(v > 0.0)) {
                throw InvalidConfigError("penalty override for term " + std::to_string(k) +
                                         " must be positive");
            }
        }
    }
}

std::size_t SignSplit::positive_terms() const {
    std::set<int> ks;
    for (const auto& t : delta_p) ks.insert(t.k);
    return ks.size();
}

std::size_t SignSplit::negative_terms() const {
    std::set<int> ks;
    for (const auto& t : delta_n) ks.insert(t.k);
    return ks.size();
}

std::optional<int> bit_width(double q_min, double q_max, double alpha) {
    if (q_min == q_max) return std::nullopt;
    const double fa = std::floor(alpha + kIntegerTolerance);
    const double need = std::max(q_max - fa, 1.0 + fa - q_min);
    int d = 0;
    while (std::ldexp(1.0, d) < need - kIntegerTolerance) ++d;
    return d;
}

IntegerBinarization binarize_integer(QuboBuilder& builder, const AffineExpr& u, double alpha,
                                     int bits, Origin origin) {
    if (bits < 0) throw InvalidConfigError("bit width must be nonnegative");
    IntegerBinarization out;
    out.floor_alpha = std::floor(alpha + kIntegerTolerance);
    out.equality = shifted(u, -out.floor_alpha - 1.0 + std::ldexp(1.0, bits));
    for (int j = 0; j <= bits; ++j) {
        const Origin o{origin.k, origin.m, j};
        const Index z = builder.add_variable(bit_label(o.k, o.m, j), VariableKind::sign_bit_z, o);
        out.bits.push_back(z);
        out.equality.terms.emplace_back(z, -std::ldexp(1.0, j));
    }
    return out;
}

double real_binarization_scale(Bounds q, int bits) {
    if (bits < 1) throw InvalidConfigError("real binarization needs at least 1 bit");
    return std::max(std::abs(q.max) / std::ldexp(1.0, bits),
                    std::abs(q.min) / (std::ldexp(1.0, bits) - 1.0));
}

RealBinarization binarize_real(QuboBuilder& builder, const AffineExpr& q, Bounds range, int bits,
                               Origin origin) {
    RealBinarization out;
    out.trivial = !(range.min < 0.0 && 0.0 < range.max);
    out.scale = real_binarization_scale(range, bits);
    if (!(out.scale > 0.0)) throw Error("real binarization of a constant quantity");
    out.equality = shifted(scaled(q, 1.0 / out.scale), std::ldexp(1.0, bits) - 1.0);
    for (int j = 0; j <= bits; ++j) {
        const Origin o{origin.k, origin.m, j};
        const Index z = builder.add_variable(bit_label(o.k, o.m, j), VariableKind::sign_bit_z, o);
        out.bits.push_back(z);
        out.equality.terms.emplace_back(z, -std::ldexp(1.0, j));
    }
    return out;
}

double default_relu_lambda(double coefficient, Bounds q, double alpha, double penalty_scale) {
    return penalty_scale * std::abs(coefficient) *
           (std::abs(q.max - alpha) + std::abs(q.min - alpha));
}

double default_discrete_lambda(double coefficient, std::span<const double> curve_values,
                               double penalty_scale) {
    double peak = 0.0;
    for (double v : curve_values) peak = std::max(peak, std::abs(v));
    return penalty_scale * std::abs(coefficient) * peak;
}

// Fitting

std::vector<ReluExpansion> fit_expansions(const CanonicalObjective& obj,
                                          const ReluQuadratizeConfig& cfg,
                                          std::vector<std::optional<Polyline>>* polylines) {
    cfg.validate();
    std::vector<ReluExpansion> out;
    out.reserve(obj.terms.size());
    if (polylines) polylines->assign(obj.terms.size(), std::nullopt);

    using Key = std::tuple<std::string, double, double>;
    std::map<Key, std::pair<ReluExpansion, std::optional<Polyline>>> cache;

    for (std::size_t k = 0; k < obj.terms.size(); ++k) {
        const ScalarCurve& f = obj.terms[k].curve;
        if (obj.already_relu || f.is_relu()) {
            out.emplace_back(0.0, 0.0, std::vector<ReluTerm>{{1.0, 0.0}});
            continue;
        }
        const Key key{f.name(), f.domain().lo, f.domain().hi};
        auto it = cache.find(key);
        if (it == cache.end()) {
            std::optional<Polyline> poly;
            std::optional<ReluExpansion> e;
            switch (cfg.strategy) {
                case FitStrategy::tangent:
                    poly = fit_tangent_polyline(f, cfg.pieces, cfg.y_end);
                    break;
                case FitStrategy::spline:
                    poly = fit_spline_polyline(f, cfg.pieces);
                    break;
                case FitStrategy::c2:
                    e = c2_relu_expansion(f, cfg.pieces);
                    break;
            }
            if (poly) e = polyline_to_relu(*poly);
            it = cache.emplace(key, std::make_pair(std::move(*e), std::move(poly))).first;
        }
        out.push_back(it->second.first);
        if (polylines) (*polylines)[k] = it->second.second;
    }
    return out;
}

SignSplit sign_split(const CanonicalObjective& obj, const std::vector<ReluExpansion>& expansions) {
    SignSplit split;
    for (std::size_t k = 0; k < obj.terms.size(); ++k) {
        if (obj.terms[k].form.is_constant()) continue;
        const auto& terms = expansions[k].terms();
        for (std::size_t m = 0; m < terms.size(); ++m) {
            const double coef = obj.terms[k].coefficient * terms[m].coefficient;
            const TermIndex idx{static_cast<int>(k), static_cast<int>(m) + 1};
            if (coef > 0.0) {
                split.delta_p.push_back(idx);
            } else if (coef < 0.0) {
                split.delta_n.push_back(idx);
            }
        }
    }
    return split;
}

// Compilation

double Compilation::surrogate(std::span<const std::uint8_t> x) const {
    double value = objective.constant;
    for (std::size_t k = 0; k < objective.terms.size(); ++k) {
        const auto& term = objective.terms[k];
        const double q = term.form(x);
        value += term.coefficient * (expansions[k] ? eval_relu(*expansions[k], q) : term.curve(q));
    }
    return value;
}

double Compilation::qubo_target(std::span<const std::uint8_t> x) const {
    return surrogate(x) - dropped_constant;
}

namespace {

struct Plan {
    // Per term: use the ReLU expansion (true) or one-hot discretization (false).
    std::vector<bool> relu;
};

void check_discretizable(const CanonicalObjective& obj) {
    if (obj.already_relu || obj.family == ModelFamily::nn) {
        throw CapabilityError(
                "discretization needs a finite value set for every q_k; network pre-activations "
                "are not quantized and can take exponentially many levels, so only the ReLU "
                "expansion method applies");
    }
}

void encode_discrete_term(QuboBuilder& b, Compilation& c, std::size_t k,
                          const DiscretizeConfig& cfg) {
    const CanonicalTerm& term = c.objective.terms[k];
    const int ki = static_cast<int>(k);
    if (!term.lattice_step) {
        throw CapabilityError("term " + std::to_string(k) + " has no quantized value set");
    }
    const double step = *term.lattice_step;
    const Bounds bounds = term.form.value_bounds();
    const long long levels = lattice_levels(bounds, step) + 1;
    if (levels > 4096) {
        throw SizeError("term " + std::to_string(k) + " has " + std::to_string(levels) +
                        " levels; discretization is limited to 4096");
    }

    DiscreteTermEncoding enc;
    enc.k = ki;
    enc.step = step;
    for (long long l = 0; l < levels; ++l) {
        const double d = bounds.min + step * static_cast<double>(l);
        enc.levels.push_back(d);
        const Origin o{ki, static_cast<int>(l), -1};
        const Index s = b.add_variable(term_label('s', ki, static_cast<int>(l)),
                                       VariableKind::one_hot_s, o);
        enc.variables.push_back(s);
        b.add_linear(s, term.coefficient * term.curve(d));
    }

    std::vector<double> values;
    for (double d : enc.levels) values.push_back(term.curve(d));
    const double fallback = default_discrete_lambda(term.coefficient, values, cfg.penalty_scale);
    auto pick = [&](const std::map<int, double>& overrides, std::optional<double> global) {
        if (auto it = overrides.find(ki); it != overrides.end()) return it->second;
        return global.value_or(fallback);
    };
    enc.lambda = pick(cfg.lambda_overrides, cfg.lambda);
    enc.lambda_prime = pick(cfg.lambda_prime_overrides, cfg.lambda_prime);

    // sum_l l s_l - u(x), in level units, and sum_l s_l - 1.
    AffineExpr value = scaled(lattice_units(term.form, bounds, step), -1.0);
    AffineExpr count{{}, -1.0};
    for (std::size_t l = 0; l < enc.variables.size(); ++l) {
        if (l > 0) value.terms.emplace_back(enc.variables[l], static_cast<double>(l));
        count.terms.emplace_back(enc.variables[l], 1.0);
    }
    if (enc.lambda > 0.0) {
        b.add_penalty(PenaltyKind::one_hot_value, Origin{ki, -1, -1}, std::move(value),
                      enc.lambda);
    }
    if (enc.lambda_prime > 0.0) {
        b.add_penalty(PenaltyKind::one_hot_count, Origin{ki, -1, -1}, std::move(count),
                      enc.lambda_prime);
    }
    c.discrete_terms.push_back(std::move(enc));
}

bool attains_zero(const CanonicalTerm& term, double alpha, std::size_t n) {
    const Bounds bounds = term.form.value_bounds();
    if (alpha < bounds.min || alpha > bounds.max) return false;
    if (term.lattice_step) return near_integer((alpha - bounds.min) / *term.lattice_step);
    if (n > kMaxScanDimension) return false;
    bool hit = false;
    const double tol = 1e-12 * std::max(1.0, std::abs(alpha));
    for_each_assignment(n, [&](std::span<const std::uint8_t> x) {
        if (std::abs(term.form(x) - alpha) <= tol) hit = true;
    });
    return hit;
}

// Problem-wide D: the override, or the widest integer term, or real_bits
// when some term needs the real-valued grid.
std::optional<int> choose_bits(const CanonicalObjective& obj,
                               const std::vector<std::optional<ReluExpansion>>& expansions,
                               const SignSplit& split, const ReluQuadratizeConfig& cfg) {
    if (split.delta_n.empty()) return cfg.bits;
    int required = 0;
    bool needs_real = false;
    for (const auto& idx : split.delta_n) {
        const CanonicalTerm& term = obj.terms[idx.k];
        const double alpha = expansions[idx.k]->terms()[idx.m - 1].threshold;
        if (!term.lattice_step) {
            needs_real = true;
            continue;
        }
        const Bounds bounds = term.form.value_bounds();
        const double step = *term.lattice_step;
        const auto d = bit_width(0.0, static_cast<double>(lattice_levels(bounds, step)),
                                 (alpha - bounds.min) / step);
        if (d) required = std::max(required, *d);
    }
    if (cfg.bits) {
        if (*cfg.bits < required) {
            throw InvalidConfigError("bits = " + std::to_string(*cfg.bits) +
                                     " cannot cover the sign-bit encodings; at least " +
                                     std::to_string(required) + " needed");
        }
        if (needs_real && *cfg.bits < 1) {
            throw InvalidConfigError("real-valued binarization needs bits >= 1");
        }
        return cfg.bits;
    }
    return needs_real ? std::max(cfg.real_bits, required) : required;
}

void encode_relu_term(QuboBuilder& b, Compilation& c, std::size_t k, const ReluQuadratizeConfig& cfg) {
    const CanonicalTerm& term = c.objective.terms[k];
    const ReluExpansion& e = *c.expansions[k];
    const int ki = static_cast<int>(k);
    const std::size_t n = c.objective.dimension;

    if (term.form.is_constant()) {
        b.add_constant(term.coefficient * eval_relu(e, term.form.offset()));
        return;
    }

    const AffineExpr q = to_affine(term.form);
    const Bounds bounds = term.form.value_bounds();
    b.add_affine(q, term.coefficient * e.base_slope());
    c.dropped_constant += term.coefficient * e.base_intercept();

    for (std::size_t mi = 0; mi < e.terms().size(); ++mi) {
        const ReluTerm& r = e.terms()[mi];
        const double coef = term.coefficient * r.coefficient;
        if (coef == 0.0) continue;

        ReluTermEncoding enc;
        enc.index = {ki, static_cast<int>(mi) + 1};
        enc.coefficient = coef;
        enc.threshold = r.threshold;
        const Origin origin{ki, enc.index.m, -1};
        const AffineExpr arg = shifted(q, -r.threshold);
        const Bounds arg_bounds{bounds.min - r.threshold, bounds.max - r.threshold};

        if (coef > 0.0) {
            enc.kind = ReluTermEncoding::Kind::dual;
            const Index t = b.add_variable(term_label('t', ki, enc.index.m), VariableKind::dual_t,
                                           origin);
            enc.variables.push_back(t);
            b.add_variable_times(t, arg, coef);
            enc.zero_crossing = attains_zero(term, r.threshold, n);
            if (enc.zero_crossing) {
                c.warnings.push_back("term " + term_label('t', ki, enc.index.m) +
                                     ": q - alpha is zero for some x; the binary dual still "
                                     "returns R(0) = 0");
            }
        } else {
            enc.lambda = default_relu_lambda(coef, bounds, r.threshold, cfg.penalty_scale);
            if (term.lattice_step) {
                const double step = *term.lattice_step;
                enc.kind = ReluTermEncoding::Kind::sign_integer;
                enc.unit = step;
                auto bin = binarize_integer(b, lattice_units(term.form, bounds, step),
                                            (r.threshold - bounds.min) / step, *c.bits, origin);
                enc.variables = bin.bits;
                b.add_variable_times(bin.bits.back(), arg, coef);
                b.add_penalty(PenaltyKind::integer_binarization, origin, std::move(bin.equality),
                              enc.lambda);
            } else {
                enc.kind = ReluTermEncoding::Kind::sign_real;
                auto bin = binarize_real(b, arg, arg_bounds, *c.bits, origin);
                enc.unit = bin.scale;
                enc.variables = bin.bits;
                b.add_variable_times(bin.bits.back(), arg, coef);
                b.add_penalty(PenaltyKind::real_binarization, origin, std::move(bin.equality),
                              enc.lambda, 0.5 + 1e-9);
                if (n <= kMaxScanDimension) {
                    for_each_assignment(n, [&](std::span<const std::uint8_t> x) {
                        const double g = term.form(x) - r.threshold;
                        const double err = std::abs(g - bin.scale * std::round(g / bin.scale));
                        c.representation_error = std::max(c.representation_error, err);
                    });
                }
            }
        }
        c.relu_terms.push_back(std::move(enc));
    }
}

Compilation compile(const CanonicalObjective& obj, Method method, const Plan& plan,
                    const std::vector<ReluExpansion>& expansions,
                    std::vector<std::optional<Polyline>> polylines,
                    const ReluQuadratizeConfig& rcfg, const DiscretizeConfig& dcfg) {
    Compilation c;
    c.method = method;
    c.objective = obj;
    c.expansions.assign(obj.terms.size(), std::nullopt);
    c.polylines.assign(obj.terms.size(), std::nullopt);
    for (std::size_t k = 0; k < obj.terms.size(); ++k) {
        if (plan.relu[k]) {
            c.expansions[k] = expansions[k];
            if (k < polylines.size()) c.polylines[k] = std::move(polylines[k]);
        }
    }

    // The split covers only terms compiled by the ReLU method.
    if (!expansions.empty()) {
        const SignSplit all = sign_split(obj, expansions);
        for (const auto& idx : all.delta_p) {
            if (plan.relu[idx.k]) c.split.delta_p.push_back(idx);
        }
        for (const auto& idx : all.delta_n) {
            if (plan.relu[idx.k]) c.split.delta_n.push_back(idx);
        }
        c.bits = choose_bits(obj, c.expansions, c.split, rcfg);
    }

    QuboBuilder b(obj.dimension);
    b.add_constant(obj.constant);
    for (std::size_t k = 0; k < obj.terms.size(); ++k) {
        if (plan.relu[k]) {
            encode_relu_term(b, c, k, rcfg);
        } else if (obj.terms[k].form.is_constant()) {
            const auto& term = obj.terms[k];
            b.add_constant(term.coefficient * term.curve(term.form.offset()));
        } else if (obj.terms[k].coefficient != 0.0) {
            encode_discrete_term(b, c, k, dcfg);
        }
    }
    if (c.representation_error > 0.0) {
        c.warnings.push_back("real-valued sign-bit grids misrepresent q - alpha by up to " +
                             format_double(c.representation_error));
    }
    c.problem = std::move(b).build();
    return c;
}

}  // namespace

Compilation quadratize_relu_method(const CanonicalObjective& obj, const ReluQuadratizeConfig& cfg) {
    std::vector<std::optional<Polyline>> polylines;
    auto expansions = fit_expansions(obj, cfg, &polylines);
    return compile(obj, Method::relu, Plan{std::vector<bool>(obj.terms.size(), true)}, expansions,
                   std::move(polylines), cfg, {});
}

Compilation quadratize_discretization(const CanonicalObjective& obj, const DiscretizeConfig& cfg) {
    cfg.validate();
    check_discretizable(obj);
    return compile(obj, Method::discretization, Plan{std::vector<bool>(obj.terms.size(), false)},
                   {}, {}, {}, cfg);
}

Compilation quadratize_mixed(const CanonicalObjective& obj, const ReluQuadratizeConfig& rcfg,
                             const DiscretizeConfig& dcfg) {
    dcfg.validate();
    if (obj.already_relu || obj.family == ModelFamily::nn) {
        throw UnsupportedCombinationError(
                "the mixed method is defined for kernel and mixture models; networks use the "
                "ReLU expansion method");
    }
    std::vector<std::optional<Polyline>> polylines;
    auto expansions = fit_expansions(obj, rcfg, &polylines);
    const SignSplit split = sign_split(obj, expansions);
    Plan plan{std::vector<bool>(obj.terms.size(), true)};
    for (const auto& idx : split.delta_n) plan.relu[idx.k] = false;
    return compile(obj, Method::mixed, plan, expansions, std::move(polylines), rcfg, dcfg);
}

Compilation quadratize(const CanonicalObjective& obj, Method method,
                       const ReluQuadratizeConfig& rcfg, const DiscretizeConfig& dcfg) {
    switch (method) {
        case Method::discretization:
            return quadratize_discretization(obj, dcfg);
        case Method::relu:
            return quadratize_relu_method(obj, rcfg);
        case Method::mixed:
            return quadratize_mixed(obj, rcfg, dcfg);
    }
    throw InvalidConfigError("unknown method");
}

}  // namespace reluqubo
