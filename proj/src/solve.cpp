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

#include "reluqubo/solve.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <thread>

namespace reluqubo {

namespace {

using Adjacency = std::vector<std::vector<std::pair<Index, double>>>;

Adjacency build_adjacency(const QuboProblem& problem) {
    Adjacency adj(problem.num_variables());
    for (const auto& q : problem.quadratic()) {
        adj[q.i].emplace_back(q.j, q.value);
        adj[q.j].emplace_back(q.i, q.value);
    }
    return adj;
}

double tie_tolerance(double value) { return 1e-12 * (1.0 + std::abs(value)); }

bool lex_less(const Assignment& a, const Assignment& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Replace (best, best_value) by (candidate, value) if it is better, with
// near-equal values resolved lexicographically.
bool improves(double value, const Assignment& candidate, double best_value,
              const Assignment& best) {
    const double tol = tie_tolerance(best_value);
    if (value > best_value + tol) return true;
    return value >= best_value - tol && lex_less(candidate, best);
}

struct Group {
    std::vector<Index> members;
    // Couplings to decision variables, per member.
    std::vector<std::vector<std::pair<Index, double>>> decision_links;
    // Couplings inside the group, as member positions.
    std::vector<std::tuple<std::size_t, std::size_t, double>> internal;
};

// Per-x maximization over independent auxiliary groups.
class GroupOracle {
 public:
    GroupOracle(const QuboProblem& problem, std::size_t max_group_size) : problem_(problem) {
        const std::size_t n = problem.num_decisions();
        const AuxiliaryGroups ag = auxiliary_groups(problem, max_group_size);
        std::vector<std::pair<std::size_t, std::size_t>> where(problem.num_variables());
        groups_.resize(ag.groups.size());
        for (std::size_t g = 0; g < ag.groups.size(); ++g) {
            groups_[g].members = ag.groups[g];
            groups_[g].decision_links.resize(ag.groups[g].size());
            for (std::size_t p = 0; p < ag.groups[g].size(); ++p) where[ag.groups[g][p]] = {g, p};
        }
        for (const auto& q : problem.quadratic()) {
            if (q.j < n) {
                decision_pairs_.push_back(q);
            } else if (q.i < n) {
                auto [g, p] = where[q.j];
                groups_[g].decision_links[p].emplace_back(q.i, q.value);
            } else {
                auto [g, p] = where[q.i];
                groups_[g].internal.emplace_back(p, where[q.j].second, q.value);
            }
        }
    }

    /// Max over auxiliaries at x; writes the lexicographically smallest
    /// maximizing completion into `full` (sized num_variables) if given.
    double operator()(std::span<const std::uint8_t> x, Assignment* full) const {
        const std::size_t n = problem_.num_decisions();
        const auto lin = problem_.linear();
        double value = problem_.constant();
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i]) value += lin[i];
        }
        for (const auto& q : decision_pairs_) {
            if (x[q.i] && x[q.j]) value += q.value;
        }
        std::vector<double> local;
        for (const auto& g : groups_) {
            const std::size_t size = g.members.size();
            local.assign(size, 0.0);
            for (std::size_t p = 0; p < size; ++p) {
                local[p] = lin[g.members[p]];
                for (const auto& [i, v] : g.decision_links[p]) {
                    if (x[i]) local[p] += v;
                }
            }
            // Member 0 is the most significant bit, so increasing codes are
            // lexicographic and the first maximizer is the smallest.
            double best = 0.0;
            std::uint64_t best_code = 0;
            const std::uint64_t total = std::uint64_t{1} << size;
            for (std::uint64_t code = 0; code < total; ++code) {
                auto bit = [&](std::size_t p) { return (code >> (size - 1 - p)) & 1u; };
                double v = 0.0;
                for (std::size_t p = 0; p < size; ++p) {
                    if (bit(p)) v += local[p];
                }
                for (const auto& [a, b, w] : g.internal) {
                    if (bit(a) && bit(b)) v += w;
                }
                if (code == 0 || v > best + tie_tolerance(best)) {
                    best = v;
                    best_code = code;
                }
            }
            value += best;
            if (full) {
                for (std::size_t p = 0; p < size; ++p) {
                    (*full)[g.members[p]] =
                            static_cast<std::uint8_t>((best_code >> (size - 1 - p)) & 1u);
                }
            }
        }
        if (full) std::copy(x.begin(), x.begin() + n, full->begin());
        return value;
    }

 private:
    const QuboProblem& problem_;
    std::vector<QuadraticTerm> decision_pairs_;
    std::vector<Group> groups_;
};

}  // namespace

bool all_penalties_satisfied(const QuboProblem& problem, std::span<const std::uint8_t> assignment) {
    for (const auto& p : problem.penalties()) {
        if (!p.satisfied(assignment)) return false;
    }
    return true;
}

SolveResult make_result(const QuboProblem& problem, Assignment assignment, SolveStats stats) {
    SolveResult r;
    r.best_value = evaluate_qubo(problem, assignment);
    r.decision_projection.assign(assignment.begin(),
                                 assignment.begin() + static_cast<long>(problem.num_decisions()));
    r.feasible = all_penalties_satisfied(problem, assignment);
    r.best_assignment = std::move(assignment);
    r.stats = stats;
    return r;
}

SolveResult brute_force(const QuboProblem& problem, std::size_t max_variables) {
    const std::size_t n = problem.num_variables();
    if (n > max_variables) {
        throw SizeError("brute force limited to " + std::to_string(max_variables) +
                        " variables, problem has " + std::to_string(n));
    }
    const Adjacency adj = build_adjacency(problem);
    const auto lin = problem.linear();

    Assignment b(n, 0);
    std::vector<double> field(lin.begin(), lin.end());
    double value = problem.constant();
    Assignment best = b;
    double best_value = value;

    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t step = 1; step < total; ++step) {
        const auto i = static_cast<std::size_t>(std::countr_zero(step));
        const double sign = b[i] ? -1.0 : 1.0;
        value += sign * field[i];
        b[i] ^= 1u;
        for (const auto& [j, q] : adj[i]) field[j] += sign * q;
        if ((step & 0xffffu) == 0) {
            value = evaluate_qubo(problem, b);
            for (std::size_t v = 0; v < n; ++v) {
                field[v] = lin[v];
                for (const auto& [j, q] : adj[v]) field[v] += b[j] ? q : 0.0;
            }
        }
        if (improves(value, b, best_value, best)) {
            best = b;
            best_value = value;
        }
    }
    return make_result(problem, std::move(best), SolveStats{total, total});
}

AuxiliaryGroups auxiliary_groups(const QuboProblem& problem, std::size_t max_group_size) {
    const auto& reg = problem.registry();
    const std::size_t n = reg.num_decisions();
    std::map<std::tuple<int, int, int>, std::size_t> by_key;
    std::vector<std::size_t> group_of(reg.size(), 0);
    AuxiliaryGroups out;
    for (Index v = n; v < reg.size(); ++v) {
        const auto& e = reg[v];
        std::tuple<int, int, int> key{-1, -1, static_cast<int>(v)};
        if (e.origin) {
            const Origin& o = *e.origin;
            key = e.kind == VariableKind::one_hot_s
                          ? std::tuple<int, int, int>{static_cast<int>(e.kind), o.k, -1}
                          : std::tuple<int, int, int>{static_cast<int>(e.kind), o.k, o.m};
        }
        auto [it, inserted] = by_key.emplace(key, out.groups.size());
        if (inserted) out.groups.emplace_back();
        out.groups[it->second].push_back(v);
        group_of[v] = it->second;
    }
    for (const auto& g : out.groups) {
        if (g.size() > max_group_size) {
            throw SizeError("auxiliary group starting at '" + reg[g.front()].label + "' has " +
                            std::to_string(g.size()) + " variables, limit " +
                            std::to_string(max_group_size));
        }
    }
    for (const auto& q : problem.quadratic()) {
        if (q.i >= n && group_of[q.i] != group_of[q.j]) {
            throw Error("auxiliaries '" + reg[q.i].label + "' and '" + reg[q.j].label +
                        "' belong to different terms but are coupled");
        }
    }
    return out;
}

std::vector<double> inner_max_values(const QuboProblem& problem, std::size_t max_decisions) {
    const std::size_t n = problem.num_decisions();
    if (n > max_decisions) {
        throw SizeError("decision enumeration limited to " + std::to_string(max_decisions) +
                        " variables, problem has " + std::to_string(n));
    }
    const GroupOracle oracle(problem, 20);
    std::vector<double> out(std::size_t{1} << n);
    Assignment x(n, 0);
    for (std::size_t code = 0; code < out.size(); ++code) {
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((code >> i) & 1u);
        out[code] = oracle(x, nullptr);
    }
    return out;
}

Assignment best_completion(const QuboProblem& problem, std::span<const std::uint8_t> x) {
    if (x.size() < problem.num_decisions()) throw DimensionError("decision assignment too short");
    const GroupOracle oracle(problem, 20);
    Assignment full(problem.num_variables(), 0);
    oracle(x, &full);
    return full;
}

void for_each_inner_max(
        const QuboProblem& problem,
        const std::function<void(std::span<const std::uint8_t>, const Assignment&, double)>& visit,
        std::size_t max_decisions) {
    const std::size_t n = problem.num_decisions();
    if (n > max_decisions) {
        throw SizeError("decision enumeration limited to " + std::to_string(max_decisions) +
                        " variables, problem has " + std::to_string(n));
    }
    const GroupOracle oracle(problem, 20);
    Assignment x(n, 0);
    Assignment full(problem.num_variables(), 0);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t code = 0; code < total; ++code) {
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<std::uint8_t>((code >> (n - 1 - i)) & 1u);
        }
        const double value = oracle(x, &full);
        visit(x, full, value);
    }
}

SolveResult structured_brute_force(const QuboProblem& problem, std::size_t max_decisions) {
    Assignment best;
    double best_value = 0.0;
    std::uint64_t visited = 0;
    for_each_inner_max(
            problem,
            [&](std::span<const std::uint8_t>, const Assignment& full, double value) {
                ++visited;
                if (best.empty() || value > best_value + tie_tolerance(best_value)) {
                    best = full;
                    best_value = value;
                }
            },
            max_decisions);
    return make_result(problem, std::move(best), SolveStats{visited, visited});
}

SolveResult simulated_annealing(const QuboProblem& problem, AnnealingSchedule schedule,
                                std::uint64_t seed, int restarts, int threads) {
    if (schedule.sweeps < 0) throw InvalidConfigError("sweeps must be nonnegative");
    if (restarts < 1) throw InvalidConfigError("restarts must be at least 1");
    if (!(schedule.beta_start > 0.0) || !(schedule.beta_end > 0.0)) {
        throw InvalidConfigError("inverse temperatures must be positive");
    }
    const std::size_t n = problem.num_variables();
    const Adjacency adj = build_adjacency(problem);
    const auto lin = problem.linear();

    struct Run {
        Assignment best;
        double value = 0.0;
        std::uint64_t proposals = 0;
    };
    std::vector<Run> runs(static_cast<std::size_t>(restarts));

    auto anneal = [&](int r) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);

        Assignment b(n);
        for (auto& v : b) v = static_cast<std::uint8_t>(rng() & 1u);
        std::vector<double> field(lin.begin(), lin.end());
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& [j, q] : adj[i]) field[i] += b[j] ? q : 0.0;
        }
        double value = evaluate_qubo(problem, b);
        Run run{b, value, 0};

        const double ratio = schedule.beta_end / schedule.beta_start;
        for (int s = 0; s < schedule.sweeps; ++s) {
            const double frac = schedule.sweeps > 1 ? static_cast<double>(s) / (schedule.sweeps - 1)
                                                    : 0.0;
            const double beta = schedule.beta_start * std::pow(ratio, frac);
            for (std::size_t i = 0; i < n; ++i) {
                const double sign = b[i] ? -1.0 : 1.0;
                const double delta = sign * field[i];
                ++run.proposals;
                if (delta >= 0.0 || uniform(rng) < std::exp(beta * delta)) {
                    b[i] ^= 1u;
                    value += delta;
                    for (const auto& [j, q] : adj[i]) field[j] += sign * q;
                    if (value > run.value + tie_tolerance(run.value)) {
                        run.best = b;
                        run.value = value;
                    }
                }
            }
        }
        run.value = evaluate_qubo(problem, run.best);
        runs[static_cast<std::size_t>(r)] = std::move(run);
    };

    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, restarts);
    if (workers == 1) {
        for (int r = 0; r < restarts; ++r) anneal(r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int r = next++; r < restarts; r = next++) anneal(r);
            });
        }
        for (auto& t : pool) t.join();
    }

    std::size_t best = 0;
    std::uint64_t proposals = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        proposals += runs[r].proposals;
        if (r > 0 && improves(runs[r].value, runs[r].best, runs[best].value, runs[best].best)) {
            best = r;
        }
    }
    return make_result(problem, std::move(runs[best].best),
                       SolveStats{proposals, static_cast<std::uint64_t>(restarts) *
                                                     static_cast<std::uint64_t>(schedule.sweeps)});
}

std::string assignment_to_string(std::span<const std::uint8_t> assignment) {
    std::string s;
    s.reserve(assignment.size());
    for (auto b : assignment) s.push_back(b ? '1' : '0');
    return s;
}

}  // namespace reluqubo
