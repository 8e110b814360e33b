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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "reluqubo/core.hpp"

namespace reluqubo {

struct SolveStats {
    std::uint64_t evaluations = 0;
    std::uint64_t iterations = 0;
};

struct SolveResult {
    Assignment best_assignment;
    double best_value = 0.0;
    Assignment decision_projection;
    /// Every penalty constraint holds at best_assignment.
    bool feasible = true;
    SolveStats stats;
};

/// Fills value, projection and feasibility for a chosen assignment.
SolveResult make_result(const QuboProblem& problem, Assignment assignment, SolveStats stats = {});

bool all_penalties_satisfied(const QuboProblem& problem, std::span<const std::uint8_t> assignment);

/// Exact maximum by Gray-code enumeration of all variables. Ties go to the
/// lexicographically smallest assignment (b_0 compared first).
SolveResult brute_force(const QuboProblem& problem, std::size_t max_variables = 26);

/// Auxiliary variables grouped by the term that introduced them: t[k,m] and
/// z[k,m,*] group by (k, m), s[k,*] by k.
struct AuxiliaryGroups {
    std::vector<std::vector<Index>> groups;
};

/// Groups auxiliaries and checks that no quadratic term couples two groups.
/// Throws Error if the structure does not allow per-group maximization.
AuxiliaryGroups auxiliary_groups(const QuboProblem& problem, std::size_t max_group_size = 20);

/// Calls visit(x, completion, value) for every decision assignment x in
/// lexicographic order (x_0 most significant), where completion is the
/// lexicographically smallest maximizing auxiliary completion.
void for_each_inner_max(
        const QuboProblem& problem,
        const std::function<void(std::span<const std::uint8_t>, const Assignment&, double)>& visit,
        std::size_t max_decisions = 20);

/// Max over auxiliaries of the QUBO value for every decision assignment x.
/// Entry `code` holds x with x_i = bit i of code.
std::vector<double> inner_max_values(const QuboProblem& problem, std::size_t max_decisions = 20);

/// Best auxiliary completion of a fixed decision assignment.
Assignment best_completion(const QuboProblem& problem, std::span<const std::uint8_t> x);

/// Exact maximum that enumerates decision variables only and maximizes each
/// auxiliary group independently. Agrees with brute_force, including ties.
SolveResult structured_brute_force(const QuboProblem& problem, std::size_t max_decisions = 20);

struct AnnealingSchedule {
    int sweeps = 2000;
    double beta_start = 0.1;
    double beta_end = 10.0;
};

/// Single-flip Metropolis with a geometric inverse-temperature schedule.
/// Restarts run on worker threads with generators seeded from (seed, restart),
/// so the result depends only on the arguments.
SolveResult simulated_annealing(const QuboProblem& problem, AnnealingSchedule schedule = {},
                                std::uint64_t seed = 0, int restarts = 64, int threads = 0);

std::string assignment_to_string(std::span<const std::uint8_t> assignment);

}  // namespace reluqubo
