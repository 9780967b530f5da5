#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "vqlab/config.hpp"

using namespace vqlab;
using nlohmann::json;

namespace {

json ballmix() {
  return json::parse(R"({
    "distribution": {"type": "ball_mixture", "centers": [[0.5, 0.0], [-0.5, 0.0]], "radius": 0.05},
    "experiment": {"k": 2, "n_grid": {"start": 32, "stop": 256, "factor": 2}, "replicates": 3, "seed": 5},
    "optimizer": {"kind": "multistart", "restarts": 4}
  })");
}

}  // namespace

TEST_CASE("a full configuration parses") {
  const RunConfig cfg = parse_config(ballmix());
  CHECK(cfg.distribution.kind() == "ball_mixture");
  CHECK(cfg.experiment.k == 2);
  CHECK(cfg.experiment.n_grid == std::vector<std::size_t>{32, 64, 128, 256});
  CHECK(cfg.experiment.replicates == 3);
  CHECK(cfg.experiment.master_seed == 5);
  CHECK(cfg.experiment.optimizer.kind == OptimizerKind::kMultistart);
  CHECK(cfg.experiment.optimizer.restarts == 4);
  CHECK(cfg.hash.size() == 16);
  CHECK_FALSE(cfg.codebook.has_value());
}

TEST_CASE("defaults and one-dimensional optimizer") {
  const RunConfig cfg = parse_config(json::parse(
      R"({"distribution": {"type": "tail_counterexample"}, "codebook": [[1], [11], [21]]})"));
  CHECK(cfg.experiment.k == 3);
  CHECK(cfg.experiment.optimizer.kind == OptimizerKind::kExact1d);
  REQUIRE(cfg.codebook.has_value());
  CHECK(*cfg.codebook == ClusterVector{{1.0}, {11.0}, {21.0}});
}

TEST_CASE("every variant round-trips through JSON") {
  const std::vector<json> docs = {
      ballmix()["distribution"],
      json::parse(R"({"type": "quasi_gaussian_mixture", "means": [[-0.5, 0], [0.5, 0]], "weights": [0.5, 0.5], "sigma": 0.05})"),
      json::parse(R"({"type": "tail_counterexample", "eta": 2, "R": 10})"),
      json::parse(R"({"type": "finite_atoms", "atoms": [[0.1], [0.9]], "probabilities": [0.25, 0.75]})")};
  for (const json& d : docs) {
    const SourceDistribution dist = distribution_from_json(d);
    const json back = distribution_to_json(dist);
    CHECK(back == distribution_to_json(distribution_from_json(back)));
    CHECK(back["type"] == d["type"]);
  }
}

TEST_CASE("schema violations are configuration errors") {
  const std::vector<std::string> bad = {
      R"([])",
      R"({"experiment": {}})",
      R"({"distribution": {"type": "cauchy"}})",
      R"({"distribution": {"type": "ball_mixture", "centers": [[0.5, 0.0]]}})",
      R"({"distribution": {"type": "ball_mixture", "centers": [[0.5, 0.0], [0.1]], "radius": 0.1}})",
      R"({"distribution": {"type": "ball_mixture", "centers": [[0.9, 0.0]], "radius": 0.5}})",
      R"({"distribution": {"type": "tail_counterexample"}, "experiment": {"replicates": 1}})",
      R"({"distribution": {"type": "tail_counterexample"}, "experiment": {"n_grid": [64, 32]}})",
      R"({"distribution": {"type": "tail_counterexample"}, "optimizer": {"kind": "annealing"}})",
      R"({"distribution": {"type": "ball_mixture", "centers": [[0.5, 0.0]], "radius": 0.1}, "optimizer": {"kind": "exact_1d"}})",
      R"({"distribution": {"type": "tail_counterexample"}, "codebook": [[1, 2]]})"};
  for (const std::string& text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_config(json::parse(text)), ConfigError);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);

  const std::string path = "test_config_malformed.json";
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(load_config(path), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("the configuration hash ignores key order and whitespace") {
  const json a = json::parse(R"({"b": 1, "a": [1, 2]})");
  const json b = json::parse("{\n  \"a\": [1,2],\n  \"b\": 1\n}");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(json::parse(R"({"b": 2, "a": [1, 2]})")));
}

TEST_CASE("CSV writers") {
  RateTable t;
  t.rows = {RateRow{32, 0.1, 0.01, 4}, RateRow{64, 1.0 / 3.0, 0.0, 4}};
  CHECK(rates_csv(t) == "n,mean_loss,stderr,replicates\n"
                        "32,0.10000000000000001,0.01,4\n"
                        "64,0.33333333333333331,0,4\n");
  const std::string plot = plot_csv(t);
  CHECK(plot.rfind("log_n,log_mean_loss,log_lower,log_upper\n", 0) == 0);
  CHECK(plot.find("\r") == std::string::npos);
  CHECK(format_double(0.1) == "0.10000000000000001");

  const std::string header = metadata_header("0123456789abcdef", 7);
  CHECK(header.find("# config_hash: 0123456789abcdef\n") != std::string::npos);
  CHECK(header.find("# seed: 7\n") != std::string::npos);
  CHECK(header.find(std::string("# vqlab_version: ") + kVersion) != std::string::npos);
}

TEST_CASE("reports serialize") {
  ConditionReport r;
  r.name = "ball_separation";
  r.lhs = 0.0025;
  r.rhs = 0.01;
  r.pass = true;
  r.quantities = {{"rho", 0.05}};
  const json j = to_json(r);
  CHECK(j["pass"] == true);
  CHECK(j["quantities"]["rho"] == 0.05);
  CHECK(to_json(RateFit{-1.0, 2.0, 1.0, 5})["slope"] == -1.0);
}
