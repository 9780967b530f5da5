#include "vqlab/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vqlab/geometry.hpp"
#include "vqlab/integration.hpp"

namespace vqlab {

double contrast(const ClusterVector& c, std::span<const double> x) {
  if (x.size() != c.dim()) throw DimensionError("point and codebook dimensions differ");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < c.k(); ++j) best = std::min(best, squared_distance(c[j], x));
  return best;
}

double empirical_risk(const ClusterVector& c, const PointSet& sample) {
  if (sample.empty()) throw PreconditionError("empirical risk of an empty sample");
  if (sample.dim() != c.dim()) throw DimensionError("sample and codebook dimensions differ");
  double sum = 0.0;
  for (std::size_t s = 0; s < sample.size(); ++s) sum += contrast(c, sample[s]);
  return sum / static_cast<double>(sample.size());
}

double true_risk(const ClusterVector& c, const SourceDistribution& dist,
                 const QuadratureTolerance& tol) {
  double r = 0.0;
  for (const CellMoments& m : cell_moments(c, dist, tol)) r += m.second;
  return r;
}

std::vector<double> gradient(const ClusterVector& c, std::span<const double> x) {
  const std::size_t d = c.dim();
  std::vector<double> g(c.flat_size(), 0.0);
  const std::size_t j = assign(c, x);
  for (std::size_t t = 0; t < d; ++t) g[j * d + t] = -2.0 * (x[t] - c[j][t]);
  return g;
}

std::vector<double> expected_gradient(const ClusterVector& c, const SourceDistribution& dist,
                                      const QuadratureTolerance& tol) {
  const std::size_t d = c.dim();
  const std::vector<CellMoments> m = cell_moments(c, dist, tol);
  std::vector<double> g(c.flat_size(), 0.0);
  for (std::size_t i = 0; i < c.k(); ++i) {
    for (std::size_t t = 0; t < d; ++t) g[i * d + t] = -2.0 * m[i].first[t];
  }
  return g;
}

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double loss(const ClusterVector& c, const OptimalSet& opt, const SourceDistribution& dist,
            const QuadratureTolerance& tol) {
  if (opt.members.empty()) throw PreconditionError("loss against an empty optimal set");
  return true_risk(c, dist, tol) - opt.risk;
}

namespace {

double aligned_distance(const ClusterVector& c, const ClusterVector& member,
                        const std::vector<std::size_t>& perm) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.k(); ++i) s += squared_distance(c[i], member[perm[i]]);
  return s;
}

std::vector<std::size_t> greedy_matching(const ClusterVector& c, const ClusterVector& member) {
  const std::size_t k = c.k();
  std::vector<std::size_t> perm(k, k);
  std::vector<bool> used_c(k, false);
  std::vector<bool> used_m(k, false);
  for (std::size_t step = 0; step < k; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (used_c[i]) continue;
      for (std::size_t j = 0; j < k; ++j) {
        if (used_m[j]) continue;
        const double dij = squared_distance(c[i], member[j]);
        if (dij < best) {
          best = dij;
          bi = i;
          bj = j;
        }
      }
    }
    perm[bi] = bj;
    used_c[bi] = true;
    used_m[bj] = true;
  }
  return perm;
}

}  // namespace

Alignment nearest_optimal(const ClusterVector& c, const OptimalSet& opt) {
  if (opt.members.empty()) throw PreconditionError("nearest member of an empty optimal set");
  const std::size_t k = c.k();
  Alignment best;
  best.squared_distance = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < opt.members.size(); ++m) {
    const ClusterVector& member = opt.members[m];
    if (member.k() != k || member.dim() != c.dim()) {
      throw DimensionError("optimal set member does not match the codebook shape");
    }
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    auto consider = [&](const std::vector<std::size_t>& p) {
      const double dist = aligned_distance(c, member, p);
      if (dist < best.squared_distance) {
        best.squared_distance = dist;
        best.member = m;
        best.permutation = p;
      }
    };
    if (k <= 8) {
      do {
        consider(perm);
      } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
      consider(greedy_matching(c, member));
    }
  }
  const ClusterVector& member = opt.members[best.member];
  std::vector<double> coords;
  coords.reserve(c.flat_size());
  for (std::size_t i = 0; i < k; ++i) {
    const auto row = member[best.permutation[i]];
    coords.insert(coords.end(), row.begin(), row.end());
  }
  best.aligned = ClusterVector(c.dim(), std::move(coords));
  return best;
}

double contrast_difference_variance(const ClusterVector& c, const ClusterVector& c2,
                                    const SourceDistribution& dist,
                                    const QuadratureTolerance& tol) {
  if (c.dim() != dist.dim() || c2.dim() != dist.dim()) {
    throw DimensionError("codebook and distribution dimensions differ");
  }
  double m1 = 0.0;
  double m2 = 0.0;

  if (const auto* atoms = std::get_if<FiniteAtoms>(&dist.variant())) {
    for (std::size_t a = 0; a < atoms->atoms.size(); ++a) {
      const double diff = contrast(c, atoms->atoms[a]) - contrast(c2, atoms->atoms[a]);
      m1 += atoms->probabilities[a] * diff;
      m2 += atoms->probabilities[a] * diff * diff;
    }
    return std::max(0.0, m2 - m1 * m1);
  }

  if (dist.dim() == 1) {
    // On each interval of the overlay both nearest clusters are fixed and
    // (x-a)^2 - (x-b)^2 = (b-a)(2x - a - b) is linear.
    const auto cells1 = voronoi_intervals(c);
    const auto cells2 = voronoi_intervals(c2);
    for (std::size_t i = 0; i < c.k(); ++i) {
      if (cells1[i].empty()) continue;
      for (std::size_t j = 0; j < c2.k(); ++j) {
        if (cells2[j].empty()) continue;
        const double lo = std::max(cells1[i].lo, cells2[j].lo);
        const double hi = std::min(cells1[i].hi, cells2[j].hi);
        if (!(hi > lo)) continue;
        const double a = c[i][0];
        const double b = c2[j][0];
        ShiftedPolynomial p;
        p.shift = 0.5 * (a + b);
        const double slope = 2.0 * (b - a);
        p.coef = {0, slope, 0, 0, 0};
        m1 += integrate_polynomial(dist.pieces(), p, lo, hi);
        p.coef = {0, 0, slope * slope, 0, 0};
        m2 += integrate_polynomial(dist.pieces(), p, lo, hi);
      }
    }
    return std::max(0.0, m2 - m1 * m1);
  }

  require_supported_dimension(dist.dim());
  for (std::size_t i = 0; i < c.k(); ++i) {
    const ConvexPolygon cell1 = voronoi_cell(c, i);
    if (cell1.empty()) continue;
    for (std::size_t j = 0; j < c2.k(); ++j) {
      ConvexPolygon region = cell1;
      const ConvexPolygon cell2 = voronoi_cell(c2, j);
      if (cell2.empty()) continue;
      for (const HalfPlane& h : cell2.constraints()) {
        region.clip(h);
        if (region.empty()) break;
      }
      if (region.empty()) continue;
      const double ax = c[i][0];
      const double ay = c[i][1];
      const double bx = c2[j][0];
      const double by = c2[j][1];
      const Values<2> v = integrate_region<2>(
          dist, region,
          [=](std::span<const double> x) {
            const double diff = (x[0] - ax) * (x[0] - ax) + (x[1] - ay) * (x[1] - ay) -
                                (x[0] - bx) * (x[0] - bx) - (x[1] - by) * (x[1] - by);
            return Values<2>{diff, diff * diff};
          },
          tol);
      m1 += v[0];
      m2 += v[1];
    }
  }
  return std::max(0.0, m2 - m1 * m1);
}

}  // namespace vqlab
