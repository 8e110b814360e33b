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

#include "reluqubo/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "reluqubo/solve.hpp"

namespace reluqubo {

ResourceCounts table2_formula(Method method, ModelFamily family, const ResourceParams& p,
                              BitConvention convention) {
    const std::size_t bits = convention == BitConvention::printed ? p.D : p.D + 1;
    const std::size_t levels = p.N + 1;
    auto undefined = [&]() -> ResourceCounts {
        throw UnsupportedCombinationError("no closed-form count for method '" + to_string(method) +
                                          "' on family '" + to_string(family) + "'");
    };
    switch (family) {
        case ModelFamily::gmm:
            if (method == Method::discretization) return {levels * p.K, 2 * p.K};
            if (method == Method::relu) return {p.M * p.K, 0};
            return undefined();
        case ModelFamily::kernel:
            if (method == Method::discretization) return {levels * p.K, 2 * p.K};
            if (method == Method::relu) {
                return {p.M * p.K_p + p.M * p.K_n * bits, p.M * p.K_n};
            }
            return {p.M * p.K_p + levels * p.K_n, 2 * p.K_n};
        case ModelFamily::nn:
            if (method == Method::relu) return {p.K_p + p.K_n * bits, p.K_n};
            return undefined();
    }
    return undefined();
}

ResourceParams resource_params(const Compilation& c) {
    ResourceParams p;
    p.N = c.objective.dimension;
    for (const auto& t : c.objective.terms) {
        if (t.coefficient == 0.0 || t.form.is_constant()) continue;
        ++p.K;
        (t.coefficient > 0.0 ? p.K_p : p.K_n) += 1;
    }
    for (const auto& e : c.expansions) {
        if (e) p.M = std::max(p.M, e->size());
    }
    p.D = static_cast<std::size_t>(c.bits.value_or(0));
    return p;
}

ResourceReport resource_report(const Compilation& c) {
    ResourceReport r;
    r.method = c.method;
    r.family = c.objective.family;
    r.params = resource_params(c);
    try {
        r.formula_printed = table2_formula(r.method, r.family, r.params, BitConvention::printed);
        r.formula_registered =
                table2_formula(r.method, r.family, r.params, BitConvention::registered);
    } catch (const UnsupportedCombinationError&) {
        r.formula_printed.reset();
        r.formula_registered.reset();
    }
    r.actual = {c.problem.registry().num_auxiliary(), c.problem.penalties().size()};
    return r;
}

std::vector<ErrorRow> approximation_error_sweep(const CanonicalObjective& obj,
                                                const std::vector<int>& pieces,
                                                ReluQuadratizeConfig base, std::size_t samples,
                                                std::uint64_t seed) {
    const std::size_t n = obj.dimension;
    std::vector<Assignment> points;
    if (n <= 12) {
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
            Assignment x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = (code >> i) & 1u;
            points.push_back(std::move(x));
        }
    } else {
        std::mt19937_64 rng(seed);
        for (std::size_t s = 0; s < samples; ++s) {
            Assignment x(n);
            for (auto& b : x) b = static_cast<std::uint8_t>(rng() & 1u);
            points.push_back(std::move(x));
        }
    }

    std::vector<ErrorRow> rows;
    for (int m : pieces) {
        base.pieces = m;
        const auto expansions = fit_expansions(obj, base);
        ErrorRow row{m, 0.0, 0.0};
        for (const auto& x : points) {
            double diff = 0.0;
            for (std::size_t k = 0; k < obj.terms.size(); ++k) {
                const auto& t = obj.terms[k];
                const double q = t.form(x);
                diff += t.coefficient * (eval_relu(expansions[k], q) - t.curve(q));
            }
            row.max_error = std::max(row.max_error, std::abs(diff));
            row.mean_error += std::abs(diff);
        }
        if (!points.empty()) row.mean_error /= static_cast<double>(points.size());
        rows.push_back(row);
    }
    return rows;
}

void write_error_csv(std::ostream& out, const std::vector<ErrorRow>& rows) {
    out << "M,max_error,mean_error\n";
    for (const auto& r : rows) {
        out << r.M << ',' << format_double(r.max_error) << ',' << format_double(r.mean_error)
            << '\n';
    }
}

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

namespace {

// Sign-bit audit of one encoded term at x: every z pattern whose penalty
// residual is within tolerance must carry z_D = [q - alpha > 0].
struct SignAudit {
    std::size_t feasible = 0;
    std::size_t mismatches = 0;
};

SignAudit audit_sign_bits(const Compilation& c, const ReluTermEncoding& enc,
                          const PenaltyConstraint& penalty, std::span<const std::uint8_t> x,
                          Assignment& scratch) {
    SignAudit audit;
    const auto& term = c.objective.terms[static_cast<std::size_t>(enc.index.k)];
    double g = term.form(x) - enc.threshold;
    const bool real = enc.kind == ReluTermEncoding::Kind::sign_real;
    // Lattice thresholds are snapped within 1e-9 steps, so q - alpha that small is zero.
    if (!real && std::abs(g) <= 1e-9 * enc.unit) g = 0.0;
    const std::size_t width = enc.variables.size();
    std::copy(x.begin(), x.end(), scratch.begin());
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << width); ++code) {
        for (std::size_t j = 0; j < width; ++j) {
            scratch[enc.variables[j]] = static_cast<std::uint8_t>((code >> j) & 1u);
        }
        if (!penalty.satisfied(scratch)) continue;
        ++audit.feasible;
        const bool sign = scratch[enc.variables.back()] != 0;
        // A real grid may round q - alpha within half a step either way.
        if (real && std::abs(g) <= 0.5 * enc.unit * (1.0 + 1e-9)) continue;
        if (sign != (g > 0.0)) ++audit.mismatches;
    }
    for (Index v : enc.variables) scratch[v] = 0;
    return audit;
}

}  // namespace

VerificationReport verify_compilation(const Compilation& c, double tolerance) {
    VerificationReport report;
    const QuboProblem& problem = c.problem;
    const std::size_t n = problem.num_decisions();

    bool has_real = false;
    for (const auto& e : c.relu_terms) has_real |= e.kind == ReluTermEncoding::Kind::sign_real;

    CheckResult recovery{"inner_max_recovery", true, false, "", 0.0};
    CheckResult feasibility{"feasibility_audit", true, false, "", 0.0};
    double best_value = 0.0;
    double best_surrogate = 0.0;
    bool first = true;
    std::size_t infeasible_points = 0;
    double worst_residual = 0.0;
    double max_surrogate = 0.0;

    for_each_inner_max(problem, [&](std::span<const std::uint8_t> x, const Assignment& full,
                                    double value) {
        recovery.measure = std::max(recovery.measure, std::abs(value - c.qubo_target(x)));
        const double s = c.surrogate(x);
        max_surrogate = first ? s : std::max(max_surrogate, s);
        bool ok = true;
        for (const auto& p : problem.penalties()) {
            const double r = std::abs(p.residual(full));
            if (!p.satisfied(full)) {
                ok = false;
                worst_residual = std::max(worst_residual, r);
            }
        }
        infeasible_points += ok ? 0 : 1;
        if (first || value > best_value + 1e-12 * (1.0 + std::abs(best_value))) {
            best_value = value;
            best_surrogate = s;
            report.optimum = full;
        }
        first = false;
    });
    report.optimum_value = best_value;

    if (has_real) {
        recovery.skipped = true;
        recovery.detail = "real-valued sign-bit grids are approximate; largest deviation " +
                          format_double(recovery.measure);
    } else {
        recovery.passed = recovery.measure <= tolerance;
        recovery.detail = "max |inner max - (surrogate - dropped constant)| = " +
                          format_double(recovery.measure);
    }
    report.checks.push_back(recovery);

    const double gap = max_surrogate - best_surrogate;
    report.checks.push_back(CheckResult{
            "argmax_agreement", has_real || gap <= tolerance * std::max(1.0, std::abs(max_surrogate)),
            has_real, "surrogate gap at the QUBO optimum = " + format_double(gap), gap});

    feasibility.measure = static_cast<double>(infeasible_points);
    feasibility.passed = infeasible_points == 0;
    feasibility.detail = infeasible_points == 0
                                 ? "every per-x optimum satisfies all " +
                                           std::to_string(problem.penalties().size()) +
                                           " penalty constraints"
                                 : std::to_string(infeasible_points) +
                                           " decision assignments have an infeasible optimum; "
                                           "largest penalty residual " +
                                           format_double(worst_residual);
    report.checks.push_back(feasibility);

    CheckResult sign{"sign_bit_semantics", true, false, "", 0.0};
    std::size_t audited = 0;
    std::size_t feasible_patterns = 0;
    std::size_t mismatches = 0;
    std::vector<const PenaltyConstraint*> penalty_of(c.relu_terms.size(), nullptr);
    for (std::size_t t = 0; t < c.relu_terms.size(); ++t) {
        for (const auto& p : problem.penalties()) {
            const Origin o{c.relu_terms[t].index.k, c.relu_terms[t].index.m, -1};
            if ((p.kind == PenaltyKind::integer_binarization ||
                 p.kind == PenaltyKind::real_binarization) &&
                p.origin == o) {
                penalty_of[t] = &p;
            }
        }
    }
    Assignment scratch(problem.num_variables(), 0);
    Assignment x(n, 0);
    for (std::size_t t = 0; t < c.relu_terms.size(); ++t) {
        const auto& enc = c.relu_terms[t];
        if (enc.kind == ReluTermEncoding::Kind::dual || !penalty_of[t]) continue;
        if (enc.variables.size() > 16) continue;
        ++audited;
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
            for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((code >> i) & 1u);
            const auto a = audit_sign_bits(c, enc, *penalty_of[t], x, scratch);
            feasible_patterns += a.feasible;
            mismatches += a.mismatches;
        }
    }
    sign.measure = static_cast<double>(mismatches);
    sign.passed = mismatches == 0;
    sign.skipped = audited == 0;
    sign.detail = audited == 0 ? "no sign-bit terms"
                               : std::to_string(audited) + " terms, " +
                                         std::to_string(feasible_patterns) +
                                         " feasible (x, z) patterns, " +
                                         std::to_string(mismatches) + " sign mismatches";
    report.checks.push_back(sign);

    const ResourceReport resources = resource_report(c);
    CheckResult counts{"resource_counts", resources.matches_registered(), !resources.formula_registered,
                       "", 0.0};
    if (resources.formula_registered) {
        counts.detail = "aux " + std::to_string(resources.actual.aux) + " / formula " +
                        std::to_string(resources.formula_registered->aux) + ", penalties " +
                        std::to_string(resources.actual.penalty) + " / formula " +
                        std::to_string(resources.formula_registered->penalty);
    } else {
        counts.detail = "no closed form for this method and family";
    }
    report.checks.push_back(counts);
    return report;
}

}  // namespace reluqubo
