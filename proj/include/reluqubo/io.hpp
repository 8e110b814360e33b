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

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reluqubo/core.hpp"
#include "reluqubo/polyline.hpp"
#include "reluqubo/quadratize.hpp"
#include "reluqubo/report.hpp"
#include "reluqubo/solve.hpp"

namespace reluqubo {

using Json = nlohmann::ordered_json;

Json to_json(const Polyline& p);
Json to_json(const ReluExpansion& e);
Json to_json(const PenaltyConstraint& p);
Json to_json(const ResourceReport& r);
Json to_json(const std::vector<ErrorRow>& rows);
Json to_json(const VerificationReport& v);

PenaltyConstraint penalty_from_json(const Json& j);

/// Sign split, penalty weights and constraints, dropped constant, fitted
/// curves, encodings and warnings of a compilation.
Json sidecar_json(const Compilation& c);

/// Penalty constraints recorded in a sidecar document.
std::vector<PenaltyConstraint> sidecar_penalties(const Json& sidecar);

/// Assignment bitstring, value, feasibility and variables grouped by term.
Json to_json(const QuboProblem& problem, const SolveResult& r);

}  // namespace reluqubo
