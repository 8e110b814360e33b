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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "reluqubo/models.hpp"
#include "reluqubo/quadratize.hpp"

namespace reluqubo {

/// Model-size parameters of the resource formulas. K counts terms with a
/// nonzero coefficient, split into K_p positive and K_n negative ones.
struct ResourceParams {
    std::size_t N = 0;
    std::size_t K = 0;
    std::size_t K_p = 0;
    std::size_t K_n = 0;
    std::size_t M = 0;
    std::size_t D = 0;
};

/// `printed` counts D bits per negative term; `registered` counts the D + 1
/// bits z_0..z_D actually created.
enum class BitConvention { printed, registered };

struct ResourceCounts {
    std::size_t aux = 0;
    std::size_t penalty = 0;

    friend bool operator==(const ResourceCounts&, const ResourceCounts&) = default;
};

/// Closed-form auxiliary and penalty counts. Throws
/// UnsupportedCombinationError for (disc, nn), (mixed, gmm) and (mixed, nn).
ResourceCounts table2_formula(Method method, ModelFamily family, const ResourceParams& params,
                              BitConvention convention = BitConvention::printed);

struct ResourceReport {
    Method method = Method::relu;
    ModelFamily family = ModelFamily::gmm;
    ResourceParams params;
    /// Empty when the (method, family) cell has no closed form.
    std::optional<ResourceCounts> formula_printed;
    std::optional<ResourceCounts> formula_registered;
    ResourceCounts actual;

    bool matches_registered() const {
        return !formula_registered || *formula_registered == actual;
    }
};

ResourceParams resource_params(const Compilation& c);
ResourceReport resource_report(const Compilation& c);

struct ErrorRow {
    int M = 0;
    double max_error = 0.0;
    double mean_error = 0.0;
};

/// |sum_k c_k (f-hat_k - f_k)(q_k(x))| per M, over every x for N <= 12 and
/// over `samples` seeded random x otherwise.
std::vector<ErrorRow> approximation_error_sweep(const CanonicalObjective& obj,
                                                const std::vector<int>& pieces,
                                                ReluQuadratizeConfig base = {},
                                                std::size_t samples = 10000,
                                                std::uint64_t seed = 0);

void write_error_csv(std::ostream& out, const std::vector<ErrorRow>& rows);

struct CheckResult {
    std::string name;
    bool passed = true;
    bool skipped = false;
    std::string detail;
    /// Headline number for the check (largest deviation or violation count).
    double measure = 0.0;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    /// Optimum found by the structured oracle.
    Assignment optimum;
    double optimum_value = 0.0;

    bool passed() const;
};

/// Audits a compilation exhaustively over x (N <= 20):
/// inner-max recovery, argmax agreement, penalty feasibility of every
/// per-x optimum, sign-bit semantics of every penalty-feasible z, and
/// resource counts against the closed forms.
VerificationReport verify_compilation(const Compilation& c, double tolerance = 1e-9);

}  // namespace reluqubo
