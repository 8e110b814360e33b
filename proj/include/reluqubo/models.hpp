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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "reluqubo/core.hpp"

namespace reluqubo {

enum class ModelFamily { gmm, kernel, nn };

std::string to_string(ModelFamily family);

struct GmmCluster {
    double weight = 1.0;  // c_k > 0
    Assignment mean;      // in {0,1}^N
    double variance = 1.0;
};

/// F(x) = sum_k c_k exp(-|x - mu_k|^2 / 2 sigma_k^2) over binary x.
class GmmModel {
 public:
    GmmModel(std::size_t dimension, std::vector<GmmCluster> clusters);

    /// Cluster with c_k = p_k (pi / sigma_k^2)^(-N/2).
    static GmmCluster cluster_from_probability(std::size_t dimension, double probability,
                                               Assignment mean, double variance);

    std::size_t dimension() const { return dimension_; }
    const std::vector<GmmCluster>& clusters() const { return clusters_; }

    double evaluate(std::span<const std::uint8_t> x) const;

 private:
    std::size_t dimension_;
    std::vector<GmmCluster> clusters_;
};

enum class KernelKind { rbf, rational_quadratic };

struct KernelPoint {
    double coefficient = 0.0;
    Assignment point;
};

/// F(x) = sum_k c_k k(|x - x_k|^2 / 2 sigma^2) with k(q) = exp(-q) or
/// k(q) = (1 + q / gamma)^(-gamma').
class KernelModel {
 public:
    KernelModel(std::size_t dimension, std::vector<KernelPoint> points, double variance,
                KernelKind kind = KernelKind::rbf, double gamma = 1.0, double gamma_prime = 1.0);

    std::size_t dimension() const { return dimension_; }
    const std::vector<KernelPoint>& points() const { return points_; }
    double variance() const { return variance_; }
    KernelKind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    double gamma_prime() const { return gamma_prime_; }

    std::size_t num_positive() const;
    std::size_t num_negative() const;

    double evaluate(std::span<const std::uint8_t> x) const;

 private:
    std::size_t dimension_;
    std::vector<KernelPoint> points_;
    double variance_;
    KernelKind kind_;
    double gamma_;
    double gamma_prime_;
};

struct HiddenNode {
    double output_weight = 0.0;
    std::vector<double> weights;
    double bias = 0.0;
};

/// F(x) = sum_k c_k max(0, w_k.x + theta_k) + c_0.
class NnModel {
 public:
    NnModel(std::size_t dimension, std::vector<HiddenNode> hidden, double output_bias);

    std::size_t dimension() const { return dimension_; }
    const std::vector<HiddenNode>& hidden() const { return hidden_; }
    double output_bias() const { return output_bias_; }

    std::size_t num_positive() const;
    std::size_t num_negative() const;

    double evaluate(std::span<const std::uint8_t> x) const;

 private:
    std::size_t dimension_;
    std::vector<HiddenNode> hidden_;
    double output_bias_;
};

using Model = std::variant<GmmModel, KernelModel, NnModel>;

ModelFamily family_of(const Model& model);
std::size_t dimension_of(const Model& model);
double evaluate_model(const Model& model, std::span<const std::uint8_t> x);

struct CanonicalTerm {
    double coefficient = 0.0;
    LinearForm form;
    ScalarCurve curve;
    /// Step A with q(x) = A * (integer combination of x) + offset, when known.
    std::optional<double> lattice_step;
};

/// F(x) = sum_k c_k f_k(q_k(x)) + constant.
struct CanonicalObjective {
    ModelFamily family = ModelFamily::gmm;
    std::size_t dimension = 0;
    std::vector<CanonicalTerm> terms;
    double constant = 0.0;
    /// Curves are the ReLU itself; no polyline fitting is needed.
    bool already_relu = false;

    double evaluate(std::span<const std::uint8_t> x) const;
};

CanonicalObjective gmm_to_canonical(const GmmModel& model);
CanonicalObjective kr_to_canonical(const KernelModel& model);
CanonicalObjective nn_to_canonical(const NnModel& model);
CanonicalObjective to_canonical(const Model& model);

/// Parses the JSON model schema; `source` prefixes error messages.
Model parse_model_json(std::string_view text, const std::string& source = "<model>");
Model load_model(const std::string& path);
std::string model_to_json(const Model& model);

}  // namespace reluqubo
