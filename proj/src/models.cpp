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

#include "reluqubo/models.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace reluqubo {

namespace {

void check_binary(const Assignment& v, std::size_t dimension, const std::string& what) {
    if (v.size() != dimension) {
        throw DimensionError(what + " has length " + std::to_string(v.size()) + ", expected " +
                             std::to_string(dimension));
    }
    for (auto b : v) {
        if (b > 1) throw Error(what + " must be binary");
    }
}

std::size_t hamming2(std::span<const std::uint8_t> x, const Assignment& center) {
    if (x.size() < center.size()) throw DimensionError("assignment shorter than model dimension");
    std::size_t d = 0;
    for (std::size_t i = 0; i < center.size(); ++i) d += (x[i] != center[i]);
    return d;
}

// |x - c|^2 / 2 sigma^2 as an affine map of x.
LinearForm squared_distance_form(const Assignment& center, double variance) {
    const double scale = 1.0 / (2.0 * variance);
    std::vector<double> weights(center.size());
    double ones = 0.0;
    for (std::size_t i = 0; i < center.size(); ++i) {
        weights[i] = (1.0 - 2.0 * center[i]) * scale;
        ones += center[i];
    }
    return LinearForm(std::move(weights), ones * scale);
}

}  // namespace

std::string to_string(ModelFamily family) {
    switch (family) {
        case ModelFamily::gmm:
            return "gmm";
        case ModelFamily::kernel:
            return "kernel";
        case ModelFamily::nn:
            return "nn";
    }
    return "unknown";
}

// GMM

GmmModel::GmmModel(std::size_t dimension, std::vector<GmmCluster> clusters)
        : dimension_(dimension), clusters_(std::move(clusters)) {
    if (dimension_ == 0) throw Error("GMM dimension must be positive");
    for (std::size_t k = 0; k < clusters_.size(); ++k) {
        const auto& c = clusters_[k];
        const std::string where = "cluster " + std::to_string(k);
        if (!(c.weight > 0.0)) throw Error(where + ": weight must be positive");
        if (!(c.variance > 0.0)) throw Error(where + ": variance must be positive");
        check_binary(c.mean, dimension_, where + " mean");
    }
}

GmmCluster GmmModel::cluster_from_probability(std::size_t dimension, double probability,
                                              Assignment mean, double variance) {
    if (!(variance > 0.0)) throw Error("cluster variance must be positive");
    const double c = probability *
                     std::pow(std::numbers::pi / variance, -static_cast<double>(dimension) / 2.0);
    return GmmCluster{c, std::move(mean), variance};
}

double GmmModel::evaluate(std::span<const std::uint8_t> x) const {
    double value = 0.0;
    for (const auto& c : clusters_) {
        value += c.weight *
                 std::exp(-static_cast<double>(hamming2(x, c.mean)) / (2.0 * c.variance));
    }
    return value;
}

// Kernel regressor

KernelModel::KernelModel(std::size_t dimension, std::vector<KernelPoint> points, double variance,
                         KernelKind kind, double gamma, double gamma_prime)
        : dimension_(dimension),
          points_(std::move(points)),
          variance_(variance),
          kind_(kind),
          gamma_(gamma),
          gamma_prime_(gamma_prime) {
    if (dimension_ == 0) throw Error("kernel model dimension must be positive");
    if (!(variance_ > 0.0)) throw Error("kernel variance must be positive");
    if (!(gamma_ > 0.0) || !(gamma_prime_ > 0.0)) throw Error("kernel shape must be positive");
    for (std::size_t k = 0; k < points_.size(); ++k) {
        check_binary(points_[k].point, dimension_, "training point " + std::to_string(k));
    }
}

std::size_t KernelModel::num_positive() const {
    std::size_t n = 0;
    for (const auto& p : points_) n += p.coefficient > 0.0;
    return n;
}

std::size_t KernelModel::num_negative() const {
    std::size_t n = 0;
    for (const auto& p : points_) n += p.coefficient < 0.0;
    return n;
}

double KernelModel::evaluate(std::span<const std::uint8_t> x) const {
    double value = 0.0;
    for (const auto& p : points_) {
        const double q = static_cast<double>(hamming2(x, p.point)) / (2.0 * variance_);
        const double k = kind_ == KernelKind::rbf ? std::exp(-q)
                                                  : std::pow(1.0 + q / gamma_, -gamma_prime_);
        value += p.coefficient * k;
    }
    return value;
}

// Neural network

NnModel::NnModel(std::size_t dimension, std::vector<HiddenNode> hidden, double output_bias)
        : dimension_(dimension), hidden_(std::move(hidden)), output_bias_(output_bias) {
    if (dimension_ == 0) throw Error("network input dimension must be positive");
    for (std::size_t k = 0; k < hidden_.size(); ++k) {
        if (hidden_[k].weights.size() != dimension_) {
            throw DimensionError("hidden node " + std::to_string(k) + " has " +
                                 std::to_string(hidden_[k].weights.size()) + " weights, expected " +
                                 std::to_string(dimension_));
        }
    }
}

std::size_t NnModel::num_positive() const {
    std::size_t n = 0;
    for (const auto& h : hidden_) n += h.output_weight > 0.0;
    return n;
}

std::size_t NnModel::num_negative() const {
    std::size_t n = 0;
    for (const auto& h : hidden_) n += h.output_weight < 0.0;
    return n;
}

double NnModel::evaluate(std::span<const std::uint8_t> x) const {
    if (x.size() < dimension_) throw DimensionError("assignment shorter than network input");
    double value = output_bias_;
    for (const auto& h : hidden_) {
        double pre = h.bias;
        for (std::size_t i = 0; i < dimension_; ++i) {
            if (x[i]) pre += h.weights[i];
        }
        value += h.output_weight * std::max(0.0, pre);
    }
    return value;
}

ModelFamily family_of(const Model& model) {
    return static_cast<ModelFamily>(model.index());
}

std::size_t dimension_of(const Model& model) {
    return std::visit([](const auto& m) { return m.dimension(); }, model);
}

double evaluate_model(const Model& model, std::span<const std::uint8_t> x) {
    return std::visit([x](const auto& m) { return m.evaluate(x); }, model);
}

// Canonical form

double CanonicalObjective::evaluate(std::span<const std::uint8_t> x) const {
    double value = constant;
    for (const auto& t : terms) value += t.coefficient * t.curve(t.form(x));
    return value;
}

CanonicalObjective gmm_to_canonical(const GmmModel& model) {
    CanonicalObjective obj;
    obj.family = ModelFamily::gmm;
    obj.dimension = model.dimension();
    const double n = static_cast<double>(model.dimension());
    for (const auto& c : model.clusters()) {
        const double step = 1.0 / (2.0 * c.variance);
        obj.terms.push_back(CanonicalTerm{c.weight, squared_distance_form(c.mean, c.variance),
                                          ScalarCurve::exp_neg({0.0, n * step}), step});
    }
    return obj;
}

CanonicalObjective kr_to_canonical(const KernelModel& model) {
    CanonicalObjective obj;
    obj.family = ModelFamily::kernel;
    obj.dimension = model.dimension();
    const double step = 1.0 / (2.0 * model.variance());
    const Interval domain{0.0, static_cast<double>(model.dimension()) * step};
    const ScalarCurve curve =
            model.kind() == KernelKind::rbf
                    ? ScalarCurve::exp_neg(domain)
                    : ScalarCurve::rational_quadratic(model.gamma(), model.gamma_prime(), domain);
    for (const auto& p : model.points()) {
        obj.terms.push_back(
                CanonicalTerm{p.coefficient, squared_distance_form(p.point, model.variance()),
                              curve, step});
    }
    return obj;
}

CanonicalObjective nn_to_canonical(const NnModel& model) {
    CanonicalObjective obj;
    obj.family = ModelFamily::nn;
    obj.dimension = model.dimension();
    obj.constant = model.output_bias();
    obj.already_relu = true;
    for (const auto& h : model.hidden()) {
        LinearForm form(h.weights, h.bias);
        Bounds b = form.value_bounds();
        if (b.min == b.max) {
            b.min -= 1.0;
            b.max += 1.0;
        }
        const auto step = detect_lattice_step(form);
        obj.terms.push_back(CanonicalTerm{h.output_weight, std::move(form),
                                          ScalarCurve::relu({b.min, b.max}), step});
    }
    return obj;
}

CanonicalObjective to_canonical(const Model& model) {
    return std::visit(
            [](const auto& m) -> CanonicalObjective {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, GmmModel>) {
                    return gmm_to_canonical(m);
                } else if constexpr (std::is_same_v<T, KernelModel>) {
                    return kr_to_canonical(m);
                } else {
                    return nn_to_canonical(m);
                }
            },
            model);
}

// JSON ingestion

namespace {

using nlohmann::json;

class JsonReader {
 public:
    explicit JsonReader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& path, const std::string& what) const {
        throw ParseError(source_ + ": " + path + ": " + what);
    }

    const json& field(const json& obj, const std::string& path, const char* key) const {
        if (!obj.is_object()) fail(path, "expected an object");
        auto it = obj.find(key);
        if (it == obj.end()) fail(join(path, key), "missing field");
        return *it;
    }

    double number(const json& value, const std::string& path) const {
        if (!value.is_number()) fail(path, "expected a number");
        return value.get<double>();
    }

    double positive(const json& value, const std::string& path) const {
        const double v = number(value, path);
        if (!(v > 0.0)) fail(path, "expected a positive number");
        return v;
    }

    std::size_t count(const json& value, const std::string& path) const {
        if (!value.is_number_integer() || value.get<long long>() <= 0) {
            fail(path, "expected a positive integer");
        }
        return value.get<std::size_t>();
    }

    Assignment binary_vector(const json& value, const std::string& path, std::size_t n) const {
        if (!value.is_array()) fail(path, "expected an array");
        if (value.size() != n) {
            fail(path, "expected " + std::to_string(n) + " entries, got " +
                               std::to_string(value.size()));
        }
        Assignment out(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& v = value[i];
            if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
                fail(path + "[" + std::to_string(i) + "]", "expected 0 or 1");
            }
            out[i] = static_cast<std::uint8_t>(v.get<int>());
        }
        return out;
    }

    std::vector<double> real_vector(const json& value, const std::string& path,
                                    std::size_t n) const {
        if (!value.is_array()) fail(path, "expected an array");
        if (value.size() != n) {
            fail(path, "expected " + std::to_string(n) + " entries, got " +
                               std::to_string(value.size()));
        }
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = number(value[i], path + "[" + std::to_string(i) + "]");
        }
        return out;
    }

    const json& array(const json& value, const std::string& path) const {
        if (!value.is_array()) fail(path, "expected an array");
        return value;
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
    static std::string at(const std::string& path, std::size_t i) {
        return path + "[" + std::to_string(i) + "]";
    }

 private:
    std::string source_;
};

GmmModel parse_gmm(const json& doc, const JsonReader& r) {
    const std::size_t n = r.count(r.field(doc, "", "N"), "N");
    const auto& clusters = r.array(r.field(doc, "", "clusters"), "clusters");
    std::vector<GmmCluster> out;
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        const std::string path = JsonReader::at("clusters", k);
        const auto& c = clusters[k];
        const double variance = r.positive(r.field(c, path, "sigma2"), path + ".sigma2");
        Assignment mean = r.binary_vector(r.field(c, path, "mu"), path + ".mu", n);
        const bool has_c = c.contains("c");
        const bool has_p = c.contains("p");
        if (has_c == has_p) r.fail(path, "give exactly one of 'c' or 'p'");
        if (has_c) {
            out.push_back(GmmCluster{r.positive(c["c"], path + ".c"), std::move(mean), variance});
        } else {
            out.push_back(GmmModel::cluster_from_probability(
                    n, r.positive(c["p"], path + ".p"), std::move(mean), variance));
        }
    }
    return GmmModel(n, std::move(out));
}

KernelModel parse_kernel(const json& doc, const JsonReader& r) {
    const std::size_t n = r.count(r.field(doc, "", "N"), "N");
    const double variance = r.positive(r.field(doc, "", "sigma2"), "sigma2");
    KernelKind kind = KernelKind::rbf;
    if (doc.contains("kernel")) {
        const auto& k = doc["kernel"];
        if (k == "rbf") {
            kind = KernelKind::rbf;
        } else if (k == "rational_quadratic") {
            kind = KernelKind::rational_quadratic;
        } else {
            r.fail("kernel", "expected \"rbf\" or \"rational_quadratic\"");
        }
    }
    const double gamma = doc.contains("gamma") ? r.positive(doc["gamma"], "gamma") : 1.0;
    const double gamma_prime =
            doc.contains("gamma_prime") ? r.positive(doc["gamma_prime"], "gamma_prime") : 1.0;
    const auto& points = r.array(r.field(doc, "", "points"), "points");
    std::vector<KernelPoint> out;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const std::string path = JsonReader::at("points", k);
        const auto& p = points[k];
        out.push_back(KernelPoint{r.number(r.field(p, path, "c"), path + ".c"),
                                  r.binary_vector(r.field(p, path, "x"), path + ".x", n)});
    }
    return KernelModel(n, std::move(out), variance, kind, gamma, gamma_prime);
}

NnModel parse_nn(const json& doc, const JsonReader& r) {
    const std::size_t n = r.count(r.field(doc, "", "N"), "N");
    const double c0 = doc.contains("c0") ? r.number(doc["c0"], "c0") : 0.0;
    const auto& hidden = r.array(r.field(doc, "", "hidden"), "hidden");
    std::vector<HiddenNode> out;
    for (std::size_t k = 0; k < hidden.size(); ++k) {
        const std::string path = JsonReader::at("hidden", k);
        const auto& h = hidden[k];
        out.push_back(HiddenNode{r.number(r.field(h, path, "c"), path + ".c"),
                                 r.real_vector(r.field(h, path, "w"), path + ".w", n),
                                 r.number(r.field(h, path, "theta"), path + ".theta")});
    }
    return NnModel(n, std::move(out), c0);
}

}  // namespace

Model parse_model_json(std::string_view text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source + ": invalid JSON: " + e.what());
    }
    JsonReader r(source);
    const auto& family = r.field(doc, "", "family");
    if (!family.is_string()) r.fail("family", "expected a string");
    const auto name = family.get<std::string>();
    try {
        if (name == "gmm") return parse_gmm(doc, r);
        if (name == "kernel") return parse_kernel(doc, r);
        if (name == "nn") return parse_nn(doc, r);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(source + ": " + e.what());
    }
    r.fail("family", "expected \"gmm\", \"kernel\" or \"nn\", got \"" + name + "\"");
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open model file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_model_json(buffer.str(), path);
}

std::string model_to_json(const Model& model) {
    json doc;
    std::visit(
            [&doc](const auto& m) {
                using T = std::decay_t<decltype(m)>;
                doc["N"] = m.dimension();
                if constexpr (std::is_same_v<T, GmmModel>) {
                    doc["family"] = "gmm";
                    doc["clusters"] = json::array();
                    for (const auto& c : m.clusters()) {
                        doc["clusters"].push_back(
                                {{"c", c.weight}, {"mu", c.mean}, {"sigma2", c.variance}});
                    }
                } else if constexpr (std::is_same_v<T, KernelModel>) {
                    doc["family"] = "kernel";
                    doc["sigma2"] = m.variance();
                    doc["kernel"] =
                            m.kind() == KernelKind::rbf ? "rbf" : "rational_quadratic";
                    if (m.kind() == KernelKind::rational_quadratic) {
                        doc["gamma"] = m.gamma();
                        doc["gamma_prime"] = m.gamma_prime();
                    }
                    doc["points"] = json::array();
                    for (const auto& p : m.points()) {
                        doc["points"].push_back({{"c", p.coefficient}, {"x", p.point}});
                    }
                } else {
                    doc["family"] = "nn";
                    doc["c0"] = m.output_bias();
                    doc["hidden"] = json::array();
                    for (const auto& h : m.hidden()) {
                        doc["hidden"].push_back(
                                {{"c", h.output_weight}, {"w", h.weights}, {"theta", h.bias}});
                    }
                }
            },
            model);
    return doc.dump(2);
}

}  // namespace reluqubo
