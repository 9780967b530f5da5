#include <doctest.h>

#include <cmath>

#include "vqlab/erm.hpp"
#include "vqlab/ratelab.hpp"

using namespace vqlab;

namespace {

RateTable synthetic(double (*f)(double)) {
  RateTable t;
  for (std::size_t n = 32; n <= 4096; n *= 2) t.rows.push_back(RateRow{n, f(static_cast<double>(n)), 0.0, 2});
  return t;
}

SourceDistribution uniform01() { return SourceDistribution::ball_mixture(PointSet{{0.5}}, 0.5); }

ExperimentConfig small_config(std::size_t k, OptimizerKind kind) {
  ExperimentConfig cfg;
  cfg.k = k;
  cfg.n_grid = {16, 64, 256, 1024};
  cfg.replicates = 24;
  cfg.master_seed = 99;
  cfg.optimizer.kind = kind;
  cfg.optimizer.restarts = 4;
  return cfg;
}

}  // namespace

TEST_CASE("log-log slope of exact power laws") {
  const RateFit one = fit_loglog_slope(synthetic([](double n) { return 7.0 / n; }));
  CHECK(one.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(one.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::exp(one.intercept) == doctest::Approx(7.0).epsilon(1e-10));
  const RateFit half = fit_loglog_slope(synthetic([](double n) { return 3.0 / std::sqrt(n); }));
  CHECK(half.slope == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("slope fitting skips non-positive rows and needs three points") {
  RateTable t = synthetic([](double n) { return 1.0 / n; });
  t.rows[0].mean_loss = 0.0;
  t.rows[1].mean_loss = -1e-9;
  const RateFit fit = fit_loglog_slope(t);
  CHECK(fit.points == t.rows.size() - 2);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
  t.rows.resize(4);
  CHECK_THROWS_AS(fit_loglog_slope(t), PreconditionError);
}

TEST_CASE("experiment configurations are validated") {
  ExperimentConfig cfg = small_config(2, OptimizerKind::kExact1d);
  CHECK_NOTHROW(cfg.validate(1));
  CHECK_THROWS_AS(cfg.validate(2), ConfigError);
  cfg.replicates = 1;
  CHECK_THROWS_AS(cfg.validate(1), ConfigError);
  cfg = small_config(2, OptimizerKind::kExact1d);
  cfg.n_grid = {16, 16};
  CHECK_THROWS_AS(cfg.validate(1), ConfigError);
  cfg.n_grid = {1, 16};
  CHECK_THROWS_AS(cfg.validate(1), ConfigError);
  CHECK(geometric_grid(32, 4096, 2) == std::vector<std::size_t>{32, 64, 128, 256, 512, 1024, 2048, 4096});
}

TEST_CASE("pairwise summation") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(pairwise_sum({}) == 0.0);
}

TEST_CASE("uniform [0,1] with the exact optimizer") {
  const auto dist = uniform01();
  const OptimalSet opt = optimal_clusters(dist, 2);
  const RateTable t = run_rate_experiment(small_config(2, OptimizerKind::kExact1d), dist, opt);
  REQUIRE(t.rows.size() == 4);
  for (std::size_t g = 0; g < t.rows.size(); ++g) {
    CHECK(t.rows[g].mean_loss > 0.0);
    CHECK(t.rows[g].stderr_loss >= 0.0);
    CHECK(t.rows[g].replicates == 24);
    if (g > 0) CHECK(t.rows[g].mean_loss < t.rows[g - 1].mean_loss);
  }
  CHECK(t.optimal_risk == doctest::Approx(1.0 / 48.0));
}

TEST_CASE("results do not depend on the thread count") {
  const auto dist = SourceDistribution::ball_mixture(PointSet{{-0.5, 0.0}, {0.5, 0.0}}, 0.1);
  const OptimalSet opt = optimal_clusters(dist, 2);
  const auto cfg = small_config(2, OptimizerKind::kMultistart);
  const RateTable a = run_rate_experiment(cfg, dist, opt, 1);
  const RateTable b = run_rate_experiment(cfg, dist, opt, 3);
  const RateTable c = run_rate_experiment(cfg, dist, opt, 8);
  for (std::size_t g = 0; g < a.rows.size(); ++g) {
    CHECK(a.rows[g].mean_loss == b.rows[g].mean_loss);
    CHECK(a.rows[g].mean_loss == c.rows[g].mean_loss);
    CHECK(a.rows[g].stderr_loss == c.rows[g].stderr_loss);
    CHECK(a.rows[g].mean_loss >= -1e-6);
  }
}

TEST_CASE("exact optimizer never loses to multistart on the same seeds") {
  const auto dist = SourceDistribution::ball_mixture(PointSet{{-0.6}, {0.0}, {0.5}}, 0.3);
  const OptimalSet opt = optimal_clusters(dist, 3);
  auto exact = small_config(3, OptimizerKind::kExact1d);
  auto multi = small_config(3, OptimizerKind::kMultistart);
  multi.optimizer.restarts = 2;
  for (std::size_t g = 0; g < exact.n_grid.size(); ++g) {
    const auto le = replicate_losses(exact, dist, opt, g);
    const auto lm = replicate_losses(multi, dist, opt, g);
    double se = 0.0;
    double sm = 0.0;
    for (std::size_t r = 0; r < le.size(); ++r) {
      se += le[r];
      sm += lm[r];
    }
    CHECK(se <= sm + 1e-12);
  }
}

TEST_CASE("finite atoms are recovered exactly once every atom is drawn") {
  const auto atoms = SourceDistribution::finite_atoms(PointSet{{0.1}, {0.4}, {0.8}}, {0.3, 0.3, 0.4});
  const OptimalSet opt = optimal_clusters(atoms, 3);
  ExperimentConfig cfg = small_config(3, OptimizerKind::kExact1d);
  cfg.n_grid = {200, 400};
  const RateTable t = run_rate_experiment(cfg, atoms, opt);
  for (const RateRow& row : t.rows) CHECK(row.mean_loss == 0.0);
}

TEST_CASE("counterexample trajectory") {
  const Trajectory t = counterexample_trajectory({22.0, 100.0, 200.0, 1000.0, 1e4, 1e5});
  CHECK(t.optimum == ClusterVector{{1.0}, {11.0}, {21.0}});
  CHECK(t.optimal_risk == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
  CHECK(t.optimum_gradient <= 1e-8);
  CHECK(t.second_moment == doctest::Approx(1694.0 / 9.0).epsilon(1e-12));

  // 1^2 + 89^2 + 9979^2.
  CHECK(t.points[1].squared_distance == 99588363.0);
  for (const TrajectoryPoint& p : t.points) {
    CHECK(p.loss == doctest::Approx(p.risk - 5.0 / 9.0).epsilon(1e-12));
    if (p.n >= 200) CHECK(std::fabs(p.risk / (1694.0 / 9.0) - 1.0) <= 0.01);
    if (p.n >= 1000) {
      CHECK(p.distance_over_n4 >= 0.95);
      CHECK(p.distance_over_n4 <= 1.05);
    }
  }
  CHECK_THROWS_AS(counterexample_trajectory({21.0}), PreconditionError);
}
