#include "vqlab/ratelab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "vqlab/erm.hpp"
#include "vqlab/random.hpp"

namespace vqlab {

void ExperimentConfig::validate(std::size_t dim) const {
  if (k == 0) throw ConfigError("k must be positive");
  if (n_grid.empty()) throw ConfigError("the n grid is empty");
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    if (n_grid[g] < k) throw ConfigError("every n in the grid must be at least k");
    if (g > 0 && n_grid[g] <= n_grid[g - 1]) throw ConfigError("the n grid must be strictly increasing");
  }
  if (replicates < 2) throw ConfigError("at least two replicates are required");
  if (optimizer.kind == OptimizerKind::kExact1d && dim != 1) {
    throw ConfigError("the exact optimizer works on the line only");
  }
  if (optimizer.kind == OptimizerKind::kMultistart && optimizer.restarts == 0) {
    throw ConfigError("multistart needs at least one restart");
  }
}

std::vector<std::size_t> geometric_grid(std::size_t start, std::size_t stop, std::size_t factor) {
  if (start == 0 || factor < 2) throw ConfigError("geometric grid needs start >= 1, factor >= 2");
  std::vector<std::size_t> g;
  for (std::size_t n = start; n <= stop; n *= factor) g.push_back(n);
  return g;
}

double pairwise_sum(const std::vector<double>& v) {
  auto rec = [&](auto&& self, std::size_t lo, std::size_t hi) -> double {
    if (hi - lo <= 8) {
      double s = 0.0;
      for (std::size_t t = lo; t < hi; ++t) s += v[t];
      return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return self(self, lo, mid) + self(self, mid, hi);
  };
  return rec(rec, 0, v.size());
}

namespace {

// Runs body(job) for job in [0, jobs) on up to `threads` workers.
template <class Body>
void parallel_for(std::size_t jobs, std::size_t threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs);
  if (threads <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) body(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t j = next.fetch_add(1);
        if (j >= jobs) return;
        try {
          body(j);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(jobs);
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double one_replicate(const ExperimentConfig& cfg, const SourceDistribution& dist,
                     const OptimalSet& opt, std::size_t g, std::size_t r) {
  const std::uint64_t seed = derive_seed(cfg.master_seed, g, r);
  const PointSet sample = dist.sample(seed, cfg.n_grid[g]);
  const ErmResult fit = cfg.optimizer.kind == OptimizerKind::kExact1d
                            ? kmeans_1d_exact(sample, cfg.k)
                            : multistart_erm(sample, cfg.k, cfg.optimizer.restarts,
                                             derive_seed(seed, 0xe5));
  return loss(fit.centers, opt, dist);
}

void check_inputs(const ExperimentConfig& cfg, const SourceDistribution& dist, const OptimalSet& opt) {
  cfg.validate(dist.dim());
  if (opt.members.empty()) throw CertificationError("the optimal set is empty");
  if (opt.members.front().k() != cfg.k) throw ConfigError("optimal set and experiment disagree on k");
}

}  // namespace

std::vector<double> replicate_losses(const ExperimentConfig& cfg, const SourceDistribution& dist,
                                     const OptimalSet& opt, std::size_t grid_index,
                                     std::size_t threads) {
  check_inputs(cfg, dist, opt);
  std::vector<double> losses(cfg.replicates);
  parallel_for(cfg.replicates, threads,
               [&](std::size_t r) { losses[r] = one_replicate(cfg, dist, opt, grid_index, r); });
  return losses;
}

RateTable run_rate_experiment(const ExperimentConfig& cfg, const SourceDistribution& dist,
                              const OptimalSet& opt, std::size_t threads) {
  check_inputs(cfg, dist, opt);
  const std::size_t reps = cfg.replicates;
  const std::size_t grid = cfg.n_grid.size();
  std::vector<double> losses(grid * reps);
  parallel_for(grid * reps, threads, [&](std::size_t job) {
    const std::size_t g = job / reps;
    const std::size_t r = job % reps;
    losses[job] = one_replicate(cfg, dist, opt, g, r);
  });

  RateTable table;
  table.optimal_risk = opt.risk;
  table.optimal_members = opt.members.size();
  for (std::size_t g = 0; g < grid; ++g) {
    const std::vector<double> row(losses.begin() + g * reps, losses.begin() + (g + 1) * reps);
    const double mean = pairwise_sum(row) / static_cast<double>(reps);
    std::vector<double> sq(reps);
    for (std::size_t r = 0; r < reps; ++r) sq[r] = (row[r] - mean) * (row[r] - mean);
    const double var = pairwise_sum(sq) / static_cast<double>(reps - 1);
    table.rows.push_back(RateRow{cfg.n_grid[g], mean, std::sqrt(var / static_cast<double>(reps)), reps});
  }
  return table;
}

RateFit fit_loglog_slope(const RateTable& table) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const RateRow& row : table.rows) {
    if (row.mean_loss > 0.0) {
      xs.push_back(std::log(static_cast<double>(row.n)));
      ys.push_back(std::log(row.mean_loss));
    }
  }
  if (xs.size() < 3) throw PreconditionError("fewer than three grid points with positive mean loss");
  const double m = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    mx += xs[t];
    my += ys[t];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    sxx += (xs[t] - mx) * (xs[t] - mx);
    sxy += (xs[t] - mx) * (ys[t] - my);
    syy += (ys[t] - my) * (ys[t] - my);
  }
  RateFit fit;
  fit.points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

Trajectory counterexample_trajectory(const std::vector<double>& n_list) {
  const SourceDistribution dist = SourceDistribution::tail_counterexample(2.0, 10.0);
  const OptimalSet opt = optimal_clusters(dist, 3);
  Trajectory out;
  out.optimum = opt.members.front();
  out.optimal_risk = opt.risk;
  out.optimum_gradient = max_norm(expected_gradient(out.optimum, dist));
  out.second_moment = dist.second_moment();
  for (double n : n_list) {
    if (!(n >= 22.0)) throw PreconditionError("counterexample trajectory needs n >= 22");
    const ClusterVector c(1, {0.0, n, n * n});
    TrajectoryPoint p;
    p.n = n;
    p.risk = true_risk(c, dist);
    p.loss = p.risk - opt.risk;
    p.squared_distance = nearest_optimal(c, opt).squared_distance;
    p.distance_over_n4 = p.squared_distance / (n * n * n * n);
    out.points.push_back(p);
  }
  return out;
}

}  // namespace vqlab
