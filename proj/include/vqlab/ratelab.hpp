#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vqlab/distributions.hpp"
#include "vqlab/risk.hpp"

namespace vqlab {

enum class OptimizerKind { kExact1d, kMultistart };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kMultistart;
  std::size_t restarts = 10;
};

struct ExperimentConfig {
  std::size_t k = 2;
  std::vector<std::size_t> n_grid;
  std::size_t replicates = 2;
  std::uint64_t master_seed = 1;
  OptimizerConfig optimizer;

  // Throws ConfigError: grid strictly increasing, every n >= k,
  // replicates >= 2, exact-1d only on the line.
  void validate(std::size_t dim) const;
};

/// Geometric grid start, start*factor, ... up to and including stop.
std::vector<std::size_t> geometric_grid(std::size_t start, std::size_t stop, std::size_t factor);

struct RateRow {
  std::size_t n = 0;
  double mean_loss = 0.0;
  double stderr_loss = 0.0;  // std / sqrt(replicates)
  std::size_t replicates = 0;
};

struct RateTable {
  std::vector<RateRow> rows;
  double optimal_risk = 0.0;
  std::size_t optimal_members = 0;
  std::string config_hash;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Replicate r at grid index g samples with derive_seed(master, g, r), runs
/// the configured minimizer and scores it by exact/quadrature true risk
/// minus R*. Work is spread over `threads` workers; results do not depend on
/// the thread count.
RateTable run_rate_experiment(const ExperimentConfig& cfg, const SourceDistribution& dist,
                              const OptimalSet& opt, std::size_t threads = 1);

/// Per-replicate losses for one grid point (exposed for tests).
std::vector<double> replicate_losses(const ExperimentConfig& cfg, const SourceDistribution& dist,
                                     const OptimalSet& opt, std::size_t grid_index,
                                     std::size_t threads = 1);

/// Ordinary least squares on (log n, log mean loss) over rows with positive
/// mean loss; needs at least three such rows.
RateFit fit_loglog_slope(const RateTable& table);

/// Pairwise (cascade) summation; fixed order, so bit-reproducible.
double pairwise_sum(const std::vector<double>& v);

struct TrajectoryPoint {
  double n = 0.0;
  double risk = 0.0;              // P gamma(c_n, .)
  double loss = 0.0;              // risk - R*
  double squared_distance = 0.0;  // |c_n - c*(c_n)|^2
  double distance_over_n4 = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  ClusterVector optimum;
  double optimal_risk = 0.0;
  double optimum_gradient = 0.0;  // |P Delta(c*)|_inf
  double second_moment = 0.0;     // P|x|^2, the limit of the risk
};

/// Codebooks c_n = (0, n, n^2) against the tail counterexample with
/// eta = 2, R = 10; n must be at least 22.
Trajectory counterexample_trajectory(const std::vector<double>& n_list);

}  // namespace vqlab
