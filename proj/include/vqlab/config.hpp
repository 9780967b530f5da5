#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vqlab/conditions.hpp"
#include "vqlab/distributions.hpp"
#include "vqlab/hessian.hpp"
#include "vqlab/ratelab.hpp"

namespace vqlab {

inline constexpr const char* kVersion = "0.1.0";

/// A parsed run configuration. Schema (all objects JSON):
///
///   distribution: {"type": "ball_mixture", "centers": [[x, y], ...], "radius": r}
///               | {"type": "quasi_gaussian_mixture", "means": [[x, y], ...],
///                  "weights": [...], "sigma": s}
///               | {"type": "tail_counterexample", "eta": 2, "R": 10}
///               | {"type": "finite_atoms", "atoms": [[x], ...], "probabilities": [...]}
///   experiment:   {"k": 3, "n_grid": [32, 64, ...] | {"start": 32, "stop": 4096, "factor": 2},
///                  "replicates": 200, "seed": 1}
///   optimizer:    {"kind": "multistart", "restarts": 10} | {"kind": "exact_1d"}
///   codebook:     [[x, y], ...]   (optional, used by `hessian --at explicit`)
///
/// Only `distribution` is required; `experiment.k` defaults to the number
/// of mixture components.
struct RunConfig {
  SourceDistribution distribution;
  ExperimentConfig experiment;
  std::optional<ClusterVector> codebook;
  std::string hash;  // FNV-1a of the canonical dump, 16 hex digits
};

/// Throws ConfigError on unreadable files, malformed JSON and schema
/// violations.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& doc);

nlohmann::json distribution_to_json(const SourceDistribution& dist);
SourceDistribution distribution_from_json(const nlohmann::json& j);

std::string config_hash(const nlohmann::json& doc);

/// "%.17g" formatting.
std::string format_double(double x);

nlohmann::json to_json(const ConditionReport& report);
nlohmann::json to_json(const RateTable& table);
nlohmann::json to_json(const RateFit& fit);
nlohmann::json to_json(const DefinitenessVerdict& verdict);
nlohmann::json to_json(const MarginEstimate& estimate);

/// Comment lines ("# key: value") carrying version, config hash and seed.
std::string metadata_header(const std::string& config_hash, std::uint64_t seed);

std::string rates_csv(const RateTable& table);
std::string plot_csv(const RateTable& table);  // log n, log mean loss
std::string trajectory_csv(const Trajectory& trajectory);

void write_text(const std::string& path, const std::string& content);

}  // namespace vqlab
