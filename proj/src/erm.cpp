#include "vqlab/erm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vqlab/hessian.hpp"
#include "vqlab/integration.hpp"

namespace vqlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sum of squared deviations of sorted[i..j] (inclusive) from their mean.
struct SegmentCost {
  std::vector<double> s1;
  std::vector<double> s2;

  explicit SegmentCost(const std::vector<double>& xs) : s1(xs.size() + 1, 0.0), s2(xs.size() + 1, 0.0) {
    // Shift by the median for conditioning.
    const double shift = xs[xs.size() / 2];
    for (std::size_t t = 0; t < xs.size(); ++t) {
      const double v = xs[t] - shift;
      s1[t + 1] = s1[t] + v;
      s2[t + 1] = s2[t] + v * v;
    }
  }

  double operator()(std::size_t i, std::size_t j) const {
    const double m = static_cast<double>(j - i + 1);
    const double a = s1[j + 1] - s1[i];
    return std::max(0.0, (s2[j + 1] - s2[i]) - a * a / m);
  }
};

void solve_layer(const SegmentCost& cost, const std::vector<double>& prev, std::vector<double>& cur,
                 std::vector<std::size_t>& arg, std::size_t layer, std::size_t jlo, std::size_t jhi,
                 std::size_t ilo, std::size_t ihi) {
  if (jlo > jhi) return;
  const std::size_t j = jlo + (jhi - jlo) / 2;
  // Cluster `layer` (0-based) covers [i, j]; earlier clusters cover [0, i-1].
  const std::size_t lo = std::max(ilo, layer);
  const std::size_t hi = std::min(ihi, j);
  double best = kInf;
  std::size_t best_i = lo;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double v = (layer == 0 ? (i == 0 ? 0.0 : kInf) : prev[i - 1]) + cost(i, j);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  cur[j] = best;
  arg[j] = best_i;
  if (j > jlo) solve_layer(cost, prev, cur, arg, layer, jlo, j - 1, ilo, best_i);
  solve_layer(cost, prev, cur, arg, layer, j + 1, jhi, best_i, ihi);
}

double incremental_mean(const std::vector<double>& xs, std::size_t lo, std::size_t hi) {
  double mean = 0.0;
  double count = 0.0;
  for (std::size_t t = lo; t <= hi; ++t) {
    count += 1.0;
    mean += (xs[t] - mean) / count;
  }
  return mean;
}

}  // namespace

ErmResult kmeans_1d_exact(const PointSet& sample, std::size_t k) {
  if (sample.dim() != 1) throw DimensionError("kmeans_1d_exact needs a one-dimensional sample");
  require_finite(sample, "sample");
  const std::size_t n = sample.size();
  if (k == 0 || n < k) throw PreconditionError("kmeans_1d_exact needs n >= k >= 1");

  std::vector<double> xs = sample.coords();
  std::sort(xs.begin(), xs.end());
  const SegmentCost cost(xs);

  std::vector<std::vector<std::size_t>> arg(k, std::vector<std::size_t>(n, 0));
  std::vector<double> prev(n, kInf);
  std::vector<double> cur(n, kInf);
  for (std::size_t layer = 0; layer < k; ++layer) {
    std::fill(cur.begin(), cur.end(), kInf);
    // With `layer + 1` clusters the last index must be at least `layer`.
    solve_layer(cost, prev, cur, arg[layer], layer, layer, n - 1, layer, n - 1);
    std::swap(prev, cur);
  }

  std::vector<double> centers(k);
  std::size_t j = n - 1;
  for (std::size_t layer = k; layer-- > 0;) {
    const std::size_t i = arg[layer][j];
    centers[layer] = incremental_mean(xs, i, j);
    if (layer > 0) j = i - 1;
  }
  ErmResult out;
  out.centers = ClusterVector(1, std::move(centers));
  out.risk = empirical_risk(out.centers, sample);
  return out;
}

ErmResult lloyd(const PointSet& sample, ClusterVector init, std::size_t max_iters, double tol) {
  if (sample.dim() != init.dim()) throw DimensionError("sample and codebook dimensions differ");
  const std::size_t n = sample.size();
  const std::size_t k = init.k();
  const std::size_t d = init.dim();
  if (n < k) throw PreconditionError("lloyd needs at least k sample points");

  std::vector<std::size_t> labels(n);
  std::vector<double> dist2(n);
  auto assign_all = [&](const ClusterVector& c) {
    double sum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      labels[s] = assign(c, sample[s]);
      dist2[s] = squared_distance(c[labels[s]], sample[s]);
      sum += dist2[s];
    }
    return sum / static_cast<double>(n);
  };

  ClusterVector centers = std::move(init);
  double risk = assign_all(centers);
  std::size_t changes = 0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    ClusterVector next = centers;
    std::vector<double> count(k, 0.0);
    std::vector<double> mean(k * d, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t j = labels[s];
      count[j] += 1.0;
      for (std::size_t t = 0; t < d; ++t) {
        mean[j * d + t] += (sample[s][t] - mean[j * d + t]) / count[j];
      }
    }
    std::vector<bool> taken(n, false);
    for (std::size_t j = 0; j < k; ++j) {
      if (count[j] > 0.0) {
        for (std::size_t t = 0; t < d; ++t) next[j][t] = mean[j * d + t];
        continue;
      }
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t s = 0; s < n; ++s) {
        if (!taken[s] && dist2[s] > far_d) {
          far_d = dist2[s];
          far = s;
        }
      }
      taken[far] = true;
      for (std::size_t t = 0; t < d; ++t) next[j][t] = sample[far][t];
    }
    if (next == centers) break;
    const std::vector<std::size_t> old_labels = labels;
    const std::vector<double> old_dist2 = dist2;
    const double next_risk = assign_all(next);
    if (next_risk > risk) {
      labels = old_labels;
      dist2 = old_dist2;
      break;
    }
    const double gain = risk - next_risk;
    centers = std::move(next);
    risk = next_risk;
    ++changes;
    if (gain <= tol) break;
  }
  return ErmResult{std::move(centers), risk, changes};
}

ClusterVector kmeanspp_init(const PointSet& sample, std::size_t k, Rng& rng) {
  const std::size_t n = sample.size();
  if (k == 0 || n < k) throw PreconditionError("k-means++ needs n >= k >= 1");
  ClusterVector c;
  c.push_back(sample[rng.index(n)]);
  std::vector<double> d2(n);
  for (std::size_t s = 0; s < n; ++s) d2[s] = squared_distance(sample[s], c[0]);
  while (c.k() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t chosen = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      chosen = n - 1;
      for (std::size_t s = 0; s < n; ++s) {
        cum += d2[s];
        if (target < cum) {
          chosen = s;
          break;
        }
      }
    } else {
      chosen = rng.index(n);
    }
    c.push_back(sample[chosen]);
    const auto added = c[c.k() - 1];
    for (std::size_t s = 0; s < n; ++s) d2[s] = std::min(d2[s], squared_distance(sample[s], added));
  }
  return c;
}

ErmResult multistart_erm(const PointSet& sample, std::size_t k, std::size_t restarts,
                         std::uint64_t seed) {
  if (restarts == 0) throw PreconditionError("multistart_erm needs at least one restart");
  require_finite(sample, "sample");
  ErmResult best;
  best.risk = kInf;
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, r));
    ErmResult run = lloyd(sample, kmeanspp_init(sample, k, rng), 1000, 0.0);
    if (run.risk < best.risk) best = std::move(run);
  }
  return best;
}

ErmResult brute_force_erm(const PointSet& sample, std::size_t k, std::size_t grid_points) {
  require_finite(sample, "sample");
  const std::size_t d = sample.dim();
  if (k == 0 || grid_points < 1) throw PreconditionError("brute_force_erm needs k, grid >= 1");
  const double per_axis = static_cast<double>(grid_points);
  const double candidates = std::pow(per_axis, static_cast<double>(d));
  if (std::pow(candidates, static_cast<double>(k)) > 5e7) {
    throw PreconditionError("brute_force_erm instance too large");
  }

  std::vector<double> lo(d, kInf);
  std::vector<double> hi(d, -kInf);
  for (std::size_t s = 0; s < sample.size(); ++s) {
    for (std::size_t t = 0; t < d; ++t) {
      lo[t] = std::min(lo[t], sample[s][t]);
      hi[t] = std::max(hi[t], sample[s][t]);
    }
  }
  const std::size_t g = static_cast<std::size_t>(candidates);
  PointSet grid;
  for (std::size_t idx = 0; idx < g; ++idx) {
    std::vector<double> p(d);
    std::size_t rem = idx;
    for (std::size_t t = 0; t < d; ++t) {
      const std::size_t step = rem % grid_points;
      rem /= grid_points;
      p[t] = grid_points == 1 ? lo[t]
                              : lo[t] + (hi[t] - lo[t]) * static_cast<double>(step) / (per_axis - 1.0);
    }
    grid.push_back(p);
  }

  // Nondecreasing index tuples enumerate every multiset of k grid points.
  std::vector<std::size_t> pick(k, 0);
  ErmResult best;
  best.risk = kInf;
  for (;;) {
    ClusterVector c;
    for (std::size_t j : pick) c.push_back(grid[j]);
    const double r = empirical_risk(c, sample);
    if (r < best.risk) {
      best.risk = r;
      best.centers = c;
    }
    std::size_t pos = k;
    while (pos > 0 && pick[pos - 1] == g - 1) --pos;
    if (pos == 0) break;
    ++pick[pos - 1];
    for (std::size_t t = pos; t < k; ++t) pick[t] = pick[pos - 1];
  }
  return best;
}

namespace {

// Clusters sorted lexicographically; the canonical representative of a
// codebook up to relabeling.
ClusterVector canonical(const ClusterVector& c) {
  std::vector<std::size_t> order(c.k());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(c[a].begin(), c[a].end(), c[b].begin(), c[b].end());
  });
  ClusterVector out;
  for (std::size_t i : order) out.push_back(c[i]);
  return out;
}

struct PopulationRun {
  ClusterVector centers;
  double risk = 0.0;
  double gradient = 0.0;
  bool degenerate = false;
};

ClusterVector lloyd_step(const ClusterVector& c, const std::vector<CellMoments>& m) {
  ClusterVector next = c;
  for (std::size_t i = 0; i < c.k(); ++i) {
    if (!(m[i].mass > 0.0)) continue;
    for (std::size_t t = 0; t < c.dim(); ++t) next[i][t] = c[i][t] + m[i].first[t] / m[i].mass;
  }
  return next;
}

bool has_duplicates(const ClusterVector& c) {
  for (std::size_t i = 0; i < c.k(); ++i) {
    for (std::size_t j = i + 1; j < c.k(); ++j) {
      if (squared_distance(c[i], c[j]) == 0.0) return true;
    }
  }
  return false;
}

// Solves A x = b in place by Gaussian elimination with partial pivoting.
bool solve_dense(std::vector<double> a, std::vector<double>& b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
    }
    if (std::fabs(a[piv * n + col]) < 1e-14) return false;
    if (piv != col) {
      for (std::size_t t = 0; t < n; ++t) std::swap(a[col * n + t], a[piv * n + t]);
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      for (std::size_t t = col; t < n; ++t) a[r * n + t] -= f * a[col * n + t];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    for (std::size_t t = col + 1; t < n; ++t) b[col] -= a[col * n + t] * b[t];
    b[col] /= a[col * n + col];
  }
  return true;
}

PopulationRun population_lloyd(const SourceDistribution& dist, ClusterVector c,
                               const OptimalSearchOptions& opt) {
  auto gradient_of = [&](const std::vector<CellMoments>& m) {
    double g = 0.0;
    for (const CellMoments& cm : m) {
      for (std::size_t t = 0; t < c.dim(); ++t) g = std::max(g, std::fabs(2.0 * cm.first[t]));
    }
    return g;
  };

  std::vector<CellMoments> m = cell_moments(c, dist, opt.tol);
  // Lloyd until the moves are small; Newton takes over from there.
  const double handoff = dist.has_density() ? 1e-7 : 0.0;
  for (std::size_t it = 0; it < opt.max_lloyd; ++it) {
    if (gradient_of(m) <= opt.gradient_tol * 1e-2) break;
    ClusterVector next = lloyd_step(c, m);
    double move = 0.0;
    for (std::size_t t = 0; t < c.flat_size(); ++t) {
      move = std::max(move, std::fabs(next.coords()[t] - c.coords()[t]));
    }
    c = std::move(next);
    m = cell_moments(c, dist, opt.tol);
    if (move <= handoff || move == 0.0) break;
  }

  if (dist.has_density() && !has_duplicates(c)) {
    for (int step = 0; step < 12; ++step) {
      const double g = gradient_of(m);
      if (g <= opt.gradient_tol * 1e-2) break;
      std::vector<double> rhs = expected_gradient(c, dist, opt.tol);
      const HessianMatrix h = analytic_hessian(c, dist);
      if (!solve_dense(h.entries(), rhs)) break;
      ClusterVector next = c;
      for (std::size_t t = 0; t < c.flat_size(); ++t) next.coords()[t] -= rhs[t];
      if (has_duplicates(next)) break;
      std::vector<CellMoments> mn = cell_moments(next, dist, opt.tol);
      if (!(gradient_of(mn) < g)) break;
      c = std::move(next);
      m = std::move(mn);
    }
  }

  PopulationRun run;
  run.gradient = gradient_of(m);
  run.risk = 0.0;
  for (const CellMoments& cm : m) run.risk += cm.second;
  for (const CellMoments& cm : m) {
    if (!(cm.mass > 0.0)) run.degenerate = true;
  }
  run.centers = std::move(c);
  return run;
}

}  // namespace

OptimalSet optimal_clusters(const SourceDistribution& dist, std::size_t k,
                            const OptimalSearchOptions& options) {
  require_supported_dimension(dist.dim());
  if (k == 0) throw PreconditionError("k must be positive");
  const std::size_t d = dist.dim();

  std::vector<ClusterVector> starts;
  const PointSet comps = dist.component_centers();
  if (comps.size() == k) starts.push_back(ClusterVector(d, comps.coords()));

  const PointSet big = dist.sample(derive_seed(options.seed, 1), 4000);
  if (d == 1) {
    std::vector<double> xs = big.coords();
    std::sort(xs.begin(), xs.end());
    std::vector<double> q(k);
    for (std::size_t i = 0; i < k; ++i) {
      q[i] = xs[static_cast<std::size_t>((i + 0.5) / k * static_cast<double>(xs.size()))];
    }
    starts.push_back(ClusterVector(1, q));
  }
  {
    Rng rng(derive_seed(options.seed, 2));
    const std::size_t structured = starts.size();
    double spread = 0.0;
    for (double v : big.coords()) spread = std::max(spread, std::fabs(v));
    for (std::size_t s = 0; s < structured; ++s) {
      for (std::size_t p = 0; p < options.perturbations; ++p) {
        ClusterVector c = starts[s];
        for (double& v : c.coords()) v += 0.05 * std::min(spread, 1.0) * rng.normal();
        starts.push_back(std::move(c));
      }
    }
    for (std::size_t r = 0; r < options.random_starts; ++r) {
      Rng seeded(derive_seed(options.seed, 3, r));
      starts.push_back(kmeanspp_init(big, k, seeded));
    }
  }

  std::vector<PopulationRun> certified;
  for (const ClusterVector& s : starts) {
    if (has_duplicates(s)) continue;
    PopulationRun run = population_lloyd(dist, s, options);
    if (run.degenerate || run.gradient > options.gradient_tol) continue;
    run.centers = canonical(run.centers);
    certified.push_back(std::move(run));
  }
  if (certified.empty()) {
    throw CertificationError("no candidate codebook passed first-order certification");
  }

  double best = kInf;
  for (const PopulationRun& r : certified) best = std::min(best, r.risk);

  OptimalSet out;
  out.risk = best;
  for (const PopulationRun& r : certified) {
    if (r.risk > best + options.risk_tol) continue;
    bool duplicate = false;
    if (!out.members.empty()) {
      const Alignment a = nearest_optimal(r.centers, out);
      duplicate = std::sqrt(a.squared_distance) <= options.dedup_tol;
    }
    if (!duplicate) out.members.push_back(r.centers);
  }
  std::sort(out.members.begin(), out.members.end(),
            [](const ClusterVector& a, const ClusterVector& b) { return a.coords() < b.coords(); });
  return out;
}

}  // namespace vqlab
