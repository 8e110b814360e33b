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

#include "reluqubo/io.hpp"

#include <map>

namespace reluqubo {

namespace {

Json origin_json(const Origin& o) { return Json::array({o.k, o.m, o.j}); }

Json counts_json(const std::optional<ResourceCounts>& c) {
    if (!c) return nullptr;
    return Json{{"aux", c->aux}, {"penalty", c->penalty}};
}

}  // namespace

Json to_json(const Polyline& p) {
    Json pieces = Json::array();
    for (const auto& piece : p.pieces()) pieces.push_back({piece.slope, piece.intercept});
    return Json{{"pieces", pieces}, {"breakpoints", p.breakpoints()}};
}

Json to_json(const ReluExpansion& e) {
    Json terms = Json::array();
    for (const auto& t : e.terms()) terms.push_back({t.coefficient, t.threshold});
    return Json{{"base", {e.base_slope(), e.base_intercept()}}, {"terms", terms}};
}

Json to_json(const PenaltyConstraint& p) {
    Json terms = Json::array();
    for (const auto& [i, c] : p.expr.terms) terms.push_back({i, c});
    return Json{{"kind", to_string(p.kind)},       {"origin", origin_json(p.origin)},
                {"weight", p.weight},              {"tolerance", p.tolerance},
                {"constant", p.expr.constant},     {"terms", terms}};
}

PenaltyConstraint penalty_from_json(const Json& j) {
    try {
        PenaltyConstraint p;
        p.kind = penalty_kind_from_string(j.at("kind").get<std::string>());
        const auto& o = j.at("origin");
        p.origin = Origin{o.at(0).get<int>(), o.at(1).get<int>(), o.at(2).get<int>()};
        p.weight = j.at("weight").get<double>();
        p.tolerance = j.at("tolerance").get<double>();
        p.expr.constant = j.at("constant").get<double>();
        for (const auto& t : j.at("terms")) {
            p.expr.terms.emplace_back(t.at(0).get<Index>(), t.at(1).get<double>());
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed penalty record: ") + e.what());
    }
}

Json to_json(const ResourceReport& r) {
    return Json{{"method", to_string(r.method)},
                {"family", to_string(r.family)},
                {"parameters",
                 {{"N", r.params.N},
                  {"K", r.params.K},
                  {"K_p", r.params.K_p},
                  {"K_n", r.params.K_n},
                  {"M", r.params.M},
                  {"D", r.params.D}}},
                {"formula_printed", counts_json(r.formula_printed)},
                {"formula_registered", counts_json(r.formula_registered)},
                {"actual", {{"aux", r.actual.aux}, {"penalty", r.actual.penalty}}},
                {"matches", r.matches_registered()}};
}

Json to_json(const std::vector<ErrorRow>& rows) {
    Json out = Json::array();
    for (const auto& r : rows) {
        out.push_back({{"M", r.M}, {"max_error", r.max_error}, {"mean_error", r.mean_error}});
    }
    return out;
}

Json to_json(const VerificationReport& v) {
    Json checks = Json::array();
    for (const auto& c : v.checks) {
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"skipped", c.skipped},
                          {"measure", c.measure},
                          {"detail", c.detail}});
    }
    return Json{{"passed", v.passed()},
                {"optimum", assignment_to_string(v.optimum)},
                {"optimum_value", v.optimum_value},
                {"checks", checks}};
}

Json sidecar_json(const Compilation& c) {
    Json doc;
    doc["method"] = to_string(c.method);
    doc["family"] = to_string(c.objective.family);
    doc["num_decisions"] = c.problem.num_decisions();
    doc["num_variables"] = c.problem.num_variables();
    doc["bits"] = c.bits ? Json(*c.bits) : Json(nullptr);
    doc["dropped_constant"] = c.dropped_constant;
    doc["model_constant"] = c.objective.constant;
    doc["representation_error"] = c.representation_error;

    Json split{{"delta_p", Json::array()},
               {"delta_n", Json::array()},
               {"K_p", c.split.positive_terms()},
               {"K_n", c.split.negative_terms()}};
    for (const auto& t : c.split.delta_p) split["delta_p"].push_back({t.k, t.m});
    for (const auto& t : c.split.delta_n) split["delta_n"].push_back({t.k, t.m});
    doc["sign_split"] = split;

    Json curves = Json::array();
    for (std::size_t k = 0; k < c.objective.terms.size(); ++k) {
        Json entry{{"k", k},
                   {"coefficient", c.objective.terms[k].coefficient},
                   {"curve", c.objective.terms[k].curve.name()}};
        if (c.polylines[k]) entry["polyline"] = to_json(*c.polylines[k]);
        if (c.expansions[k]) entry["expansion"] = to_json(*c.expansions[k]);
        curves.push_back(std::move(entry));
    }
    doc["terms"] = curves;

    Json relu = Json::array();
    for (const auto& e : c.relu_terms) {
        relu.push_back({{"k", e.index.k},
                        {"m", e.index.m},
                        {"encoding", to_string(e.kind)},
                        {"coefficient", e.coefficient},
                        {"threshold", e.threshold},
                        {"unit", e.unit},
                        {"lambda", e.lambda},
                        {"zero_crossing", e.zero_crossing},
                        {"variables", e.variables}});
    }
    doc["relu_terms"] = relu;

    Json disc = Json::array();
    for (const auto& d : c.discrete_terms) {
        disc.push_back({{"k", d.k},
                        {"levels", d.levels},
                        {"lambda", d.lambda},
                        {"lambda_prime", d.lambda_prime},
                        {"variables", d.variables}});
    }
    doc["discrete_terms"] = disc;

    Json penalties = Json::array();
    for (const auto& p : c.problem.penalties()) penalties.push_back(to_json(p));
    doc["penalties"] = penalties;
    doc["warnings"] = c.warnings;
    return doc;
}

std::vector<PenaltyConstraint> sidecar_penalties(const Json& sidecar) {
    std::vector<PenaltyConstraint> out;
    if (!sidecar.contains("penalties")) return out;
    for (const auto& p : sidecar.at("penalties")) out.push_back(penalty_from_json(p));
    return out;
}

Json to_json(const QuboProblem& problem, const SolveResult& r) {
    const auto& reg = problem.registry();
    std::map<std::string, std::string> grouped;
    std::vector<std::string> order;
    for (Index v = reg.num_decisions(); v < reg.size(); ++v) {
        const auto& e = reg[v];
        std::string key = e.label;
        if (e.origin) {
            const Origin& o = *e.origin;
            key = e.kind == VariableKind::one_hot_s
                          ? "s[" + std::to_string(o.k) + "]"
                          : (e.kind == VariableKind::dual_t ? "t[" : "z[") + std::to_string(o.k) +
                                    "," + std::to_string(o.m) + "]";
        }
        if (!grouped.count(key)) order.push_back(key);
        grouped[key].push_back(r.best_assignment[v] ? '1' : '0');
    }
    Json aux = Json::object();
    for (const auto& key : order) aux[key] = grouped[key];

    return Json{{"assignment", assignment_to_string(r.best_assignment)},
                {"x", assignment_to_string(r.decision_projection)},
                {"value", r.best_value},
                {"feasible", r.feasible},
                {"auxiliary", aux},
                {"stats", {{"evaluations", r.stats.evaluations}, {"iterations", r.stats.iterations}}}};
}

}  // namespace reluqubo
