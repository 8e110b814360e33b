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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "catch_amalgamated.hpp"

#include "cli.hpp"

namespace reluqubo {

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

const fs::path kFixtures = RELUQUBO_FIXTURES;

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "reluqubo");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("reluqubo_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string fixture(const std::string& name) { return (kFixtures / name).string(); }

}  // namespace

TEST_CASE("fit on a bare curve lists the tangent parameters", "[cli]") {
    const fs::path dir = scratch("fit_curve");
    const Outcome r = run_cli({"fit", "--curve", "exp_neg", "--domain", "0", "4", "--y-end", "0",
                               "--pieces", "2", "--out-dir", dir.string()});
    CHECK(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("0.8428"));
    const Json doc = Json::parse(slurp(dir / "polylines.json"));
    const auto& pieces = doc["curves"][0]["polyline"]["pieces"];
    CHECK_THAT(pieces[1][0].get<double>(), WithinAbs(-0.0498, 1e-3));
    CHECK_THAT(pieces[1][1].get<double>(), WithinAbs(0.199, 1e-3));
}

TEST_CASE("fit on a network needs no polyline", "[cli]") {
    const fs::path dir = scratch("fit_nn");
    const Outcome r = run_cli({"fit", "--model", fixture("nn.json"), "--out-dir", dir.string()});
    CHECK(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("already a sum of ReLU terms"));
    CHECK(Json::parse(slurp(dir / "polylines.json"))["already_relu"] == true);
}

TEST_CASE("build output is byte-identical across runs", "[cli]") {
    for (const std::string method : {"relu", "disc", "mixed"}) {
        CAPTURE(method);
        const fs::path a = scratch("build_a_" + method);
        const fs::path b = scratch("build_b_" + method);
        for (const auto& dir : {a, b}) {
            const Outcome r = run_cli({"build", "--model", fixture("kr_mixed.json"), "--method", method,
                                       "--pieces", "3", "--out-dir", dir.string()});
            REQUIRE(r.code == 0);
        }
        CHECK(slurp(a / "qubo.txt") == slurp(b / "qubo.txt"));
        CHECK(slurp(a / "qubo.sidecar.json") == slurp(b / "qubo.sidecar.json"));
    }
}

TEST_CASE("build, solve, verify and report pipeline", "[cli]") {
    const fs::path dir = scratch("pipeline");
    const std::string model = fixture("gmm.json");
    REQUIRE(run_cli({"build", "--model", model, "--out-dir", dir.string()}).code == 0);
    const Json sidecar = Json::parse(slurp(dir / "qubo.sidecar.json"));
    CHECK(sidecar["method"] == "relu");
    CHECK(sidecar["sign_split"]["K_n"] == 0);

    REQUIRE(run_cli({"solve", "--out-dir", dir.string()}).code == 0);
    const Json structured = Json::parse(slurp(dir / "result.json"));
    CHECK(structured["feasible"] == true);

    REQUIRE(run_cli({"solve", "--solver", "brute", "--out-dir", dir.string()}).code == 0);
    const Json brute = Json::parse(slurp(dir / "result.json"));
    CHECK(brute["assignment"] == structured["assignment"]);

    REQUIRE(run_cli({"solve", "--solver", "sa", "--seed", "3", "--sweeps", "300", "--restarts", "8",
                     "--out-dir", dir.string()})
                    .code == 0);
    const Json sa = Json::parse(slurp(dir / "result.json"));
    CHECK(sa["value"].get<double>() <= brute["value"].get<double>() + 1e-12);

    const Outcome v = run_cli({"verify", "--model", model, "--out-dir", dir.string()});
    CHECK(v.code == 0);
    CHECK_THAT(v.out, ContainsSubstring("PASS"));
    CHECK_FALSE(Json::parse(slurp(dir / "verification.json"))["checks"].empty());

    REQUIRE(run_cli({"report", "--model", model, "--sweep-pieces", "2", "3", "--out-dir", dir.string()})
                    .code == 0);
    const std::string csv = slurp(dir / "error_sweep.csv");
    CHECK(csv.rfind("M,max_error,mean_error\n2,", 0) == 0);
    const Json resources = Json::parse(slurp(dir / "resources.json"));
    CHECK(resources.contains("actual"));
}

TEST_CASE("verify fails on undersized penalties", "[cli]") {
    const fs::path dir = scratch("tiny_lambda");
    const Outcome r = run_cli({"verify", "--config", fixture("tiny_lambda.json"), "--out-dir", dir.string()});
    CHECK(r.code == 1);
    CHECK_THAT(r.out, ContainsSubstring("FAIL"));
}

TEST_CASE("sign-bit fixtures verify", "[cli]") {
    for (const std::string model : {"kr_mixed.json", "nn.json"}) {
        const fs::path dir = scratch("signbits");
        const Outcome r = run_cli({"verify", "--model", fixture(model), "--out-dir", dir.string()});
        CAPTURE(model, r.out, r.err);
        CHECK(r.code == 0);
    }
}

TEST_CASE("flags override config fields", "[cli]") {
    const fs::path dir = scratch("override");
    cli::PipelineConfig cfg;
    cli::apply_config_json(cfg, Json::parse(slurp(kFixtures / "pipeline.json")), kFixtures);
    CHECK(cfg.relu.pieces == 2);
    CHECK(cfg.seed == 11);
    CHECK(cfg.model_path == fixture("kr_mixed.json"));

    REQUIRE(run_cli({"build", "--config", fixture("pipeline.json"), "--out-dir", dir.string()}).code == 0);
    const Json two = Json::parse(slurp(dir / "qubo.sidecar.json"));
    REQUIRE(run_cli({"build", "--config", fixture("pipeline.json"), "--pieces", "4", "--method", "mixed",
                     "--out-dir", dir.string()})
                    .code == 0);
    const Json four = Json::parse(slurp(dir / "qubo.sidecar.json"));
    CHECK(two["method"] == "relu");
    CHECK(four["method"] == "mixed");
    CHECK(two["terms"][0]["expansion"]["terms"].size() == 2);
    CHECK(four["terms"][0]["expansion"]["terms"].size() == 4);
}

TEST_CASE("usage and input errors exit with code 2", "[cli]") {
    const fs::path dir = scratch("errors");
    CHECK(run_cli({"build", "--out-dir", dir.string()}).code == 2);
    CHECK(run_cli({"build", "--model", fixture("gmm.json"), "--method", "wolfe"}).code == 2);
    CHECK(run_cli({"build", "--model", fixture("nn.json"), "--method", "disc", "--out-dir", dir.string()})
                  .code == 2);
    CHECK(run_cli({"fit", "--curve", "exp_neg", "--pieces", "1", "--out-dir", dir.string()}).code == 2);
    const Outcome missing = run_cli({"build", "--model", "/nonexistent.json", "--out-dir", dir.string()});
    CHECK(missing.code == 2);
    CHECK_THAT(missing.err, ContainsSubstring("error:"));

    cli::PipelineConfig cfg;
    CHECK_THROWS_AS(cli::apply_config_json(cfg, Json::parse(R"({"pices": 3})"), "."), InvalidConfigError);
    CHECK_THROWS_AS(cli::apply_config_json(cfg, Json::parse(R"({"pieces": "three"})"), "."),
                    InvalidConfigError);
}

}  // namespace reluqubo
