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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "reluqubo/io.hpp"
#include "reluqubo/models.hpp"
#include "reluqubo/quadratize.hpp"
#include "reluqubo/solve.hpp"

namespace reluqubo::cli {

enum class Solver { brute, structured, annealing };

struct PipelineConfig {
    std::string model_path;
    std::string qubo_path;
    Method method = Method::relu;
    ReluQuadratizeConfig relu;
    DiscretizeConfig discretize;
    Solver solver = Solver::structured;
    AnnealingSchedule schedule;
    int restarts = 64;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = ".";
    std::vector<int> sweep_pieces = {2, 3, 4};

    // `fit` on a bare curve instead of a model.
    std::string curve;
    std::optional<Interval> domain;
    double gamma = 1.0;
    double gamma_prime = 1.0;
};

/// Fields of a JSON config document applied on top of `cfg`. Relative
/// paths are resolved against `base_dir`.
void apply_config_json(PipelineConfig& cfg, const Json& doc, const std::filesystem::path& base_dir);

struct CurveFit {
    std::string curve;
    Interval domain;
    std::vector<int> terms;
    std::optional<Polyline> polyline;
    ReluExpansion expansion;
    std::vector<double> tangent_points;
};

struct FitReport {
    bool already_relu = false;
    std::vector<CurveFit> fits;
};

FitReport cmd_fit(const PipelineConfig& cfg, std::ostream& log);
Compilation cmd_build(const PipelineConfig& cfg, std::ostream& log);
SolveResult cmd_solve(const PipelineConfig& cfg, std::ostream& log);
VerificationReport cmd_verify(const PipelineConfig& cfg, std::ostream& log);
ResourceReport cmd_report(const PipelineConfig& cfg, std::ostream& log);

/// Parses arguments and runs one subcommand. Returns the process exit code:
/// 0 on success, 1 when verification fails, 2 on usage or input errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace reluqubo::cli
