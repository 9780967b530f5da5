#include "vqlab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vqlab/geometry.hpp"
#include "vqlab/integration.hpp"
#include "vqlab/random.hpp"

namespace vqlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_density_on_face(const SourceDistribution& dist, const BoundaryFace& face) {
  if (face.dim == 1) {
    const double x = face.a[0];
    return dist.density(std::span<const double>(&x, 1));
  }
  auto f = [&](double s) {
    const Point2 p = face.point_at(s);
    return dist.density(std::span<const double>(p.data(), 2));
  };
  constexpr int kSamples = 1000;
  double best = -1.0;
  double best_s = 0.0;
  for (int m = 0; m <= kSamples; ++m) {
    const double s = static_cast<double>(m) / kSamples;
    const double v = f(s);
    if (v > best) {
      best = v;
      best_s = s;
    }
  }
  // Golden-section refinement on the bracketing cell.
  double a = std::max(0.0, best_s - 1.0 / kSamples);
  double b = std::min(1.0, best_s + 1.0 / kSamples);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  return std::max({best, f1, f2});
}

double min_cluster_separation(const OptimalSet& opt) {
  double b = kInf;
  for (const ClusterVector& m : opt.members) {
    for (std::size_t i = 0; i < m.k(); ++i) {
      for (std::size_t j = i + 1; j < m.k(); ++j) b = std::min(b, std::sqrt(squared_distance(m[i], m[j])));
    }
  }
  return b;
}

const QuasiGaussianMixture& as_mixture(const SourceDistribution& dist) {
  const auto* q = std::get_if<QuasiGaussianMixture>(&dist.variant());
  if (q == nullptr) throw PreconditionError("this check applies to quasi-Gaussian mixtures only");
  return *q;
}

}  // namespace

double boundary_density_threshold(std::size_t d, double min_separation, double min_cell_mass) {
  const double h = 0.5 * static_cast<double>(d);
  return std::tgamma(h) * min_separation /
         (std::pow(2.0, static_cast<double>(d) + 5.0) * std::pow(std::numbers::pi, h)) * min_cell_mass;
}

ConditionReport check_boundary_density_bound(const SourceDistribution& dist, const OptimalSet& opt) {
  if (!dist.has_density()) {
    throw PreconditionError("the boundary density bound needs a distribution with a density");
  }
  if (opt.members.empty()) throw PreconditionError("empty optimal set");
  const std::size_t d = dist.dim();

  double sup_f = 0.0;
  double min_mass = kInf;
  std::size_t faces = 0;
  for (const ClusterVector& member : opt.members) {
    for (const CellMoments& m : cell_moments(member, dist)) min_mass = std::min(min_mass, m.mass);
    for (const BoundaryFace& face : boundary_faces(member, dist.support_radius())) {
      sup_f = std::max(sup_f, max_density_on_face(dist, face));
      ++faces;
    }
  }
  const double separation = min_cluster_separation(opt);

  ConditionReport r;
  r.name = "boundary_density_bound";
  r.lhs = sup_f;
  r.rhs = boundary_density_threshold(d, separation, min_mass);
  r.pass = r.lhs <= r.rhs;
  r.quantities = {{"sup_density_on_boundaries", sup_f},
                  {"min_separation_B", separation},
                  {"min_cell_mass", min_mass},
                  {"threshold", r.rhs},
                  {"faces_examined", static_cast<double>(faces)},
                  {"optimal_members", static_cast<double>(opt.members.size())}};
  r.notes.push_back("sup of the density over faces: 1000 samples per face plus golden-section refinement");
  return r;
}

ConditionReport check_ball_separation(double rho, double R, std::size_t d) {
  if (!(rho > 0.0) || !(R > 0.0)) throw PreconditionError("rho and R must be positive");
  const double dd = static_cast<double>(d);
  const double gap = 0.5 * R - 3.0 * rho;
  ConditionReport r;
  r.name = "ball_separation";
  r.lhs = 2.0 * rho * rho * dd / (dd + 2.0);
  r.rhs = gap * gap;
  r.pass = gap > 0.0 && r.lhs <= r.rhs;
  r.quantities = {{"rho", rho}, {"R", R}, {"d", dd}, {"half_R_minus_3rho", gap}};
  if (!(gap > 0.0)) r.notes.push_back("R/2 - 3 rho is not positive");
  return r;
}

ConditionReport check_ball_separation(const SourceDistribution& dist) {
  const auto* b = std::get_if<BallMixture>(&dist.variant());
  if (b == nullptr) throw PreconditionError("ball separation applies to ball mixtures only");
  const double R = min_pairwise_distance(b->centers);
  if (!std::isfinite(R)) {
    ConditionReport r;
    r.name = "ball_separation";
    r.pass = true;
    r.notes.push_back("single ball: nothing to separate");
    return r;
  }
  return check_ball_separation(b->radius, R, dist.dim());
}

PolarizationTerms polarization_terms(std::size_t k, double sigma, double epsilon,
                                     double mean_separation) {
  PolarizationTerms t;
  const double kk = static_cast<double>(k);
  const double s2 = sigma * sigma;
  const double bt = mean_separation;
  if (!std::isfinite(bt)) return t;  // one component: no constraint
  t.proximity = 288.0 * kk * s2 / ((1.0 - epsilon) * bt * bt * (-std::expm1(-bt * bt / (288.0 * s2))));
  const double growth = std::expm1(bt / (72.0 * s2));
  t.boundary = std::isinf(growth) ? 0.0 : 96.0 * kk / ((1.0 - epsilon) * s2 * bt * growth);
  return t;
}

ConditionReport check_mixture_polarization(const SourceDistribution& dist) {
  const QuasiGaussianMixture& q = as_mixture(dist);
  const std::size_t k = q.means.size();
  const double eps = 1.0 - *std::min_element(q.normalizers.begin(), q.normalizers.end());
  const double bt = min_pairwise_distance(q.means);
  const auto [pmin_it, pmax_it] = std::minmax_element(q.weights.begin(), q.weights.end());
  const double ratio = *pmin_it / *pmax_it;
  const PolarizationTerms t = polarization_terms(k, q.sigma, eps, bt);

  ConditionReport r;
  r.name = "mixture_polarization";
  r.lhs = std::max(t.proximity, t.boundary);
  r.rhs = ratio;
  r.pass = r.lhs <= r.rhs;
  r.quantities = {{"proximity_term", t.proximity},
                  {"boundary_term", t.boundary},
                  {"binding_term", t.proximity >= t.boundary ? 1.0 : 2.0},
                  {"epsilon", eps},
                  {"mean_separation_Btilde", bt},
                  {"p_min", *pmin_it},
                  {"p_max", *pmax_it},
                  {"sigma", q.sigma}};
  r.notes.push_back(t.proximity >= t.boundary ? "binding term: proximity (first)"
                                              : "binding term: boundary (second)");
  return r;
}

ConditionReport verify_mean_proximity(const SourceDistribution& dist, const OptimalSet& opt) {
  const QuasiGaussianMixture& q = as_mixture(dist);
  if (opt.members.empty()) throw PreconditionError("empty optimal set");
  const std::size_t k = q.means.size();
  const double eps = 1.0 - *std::min_element(q.normalizers.begin(), q.normalizers.end());
  const double bt = min_pairwise_distance(q.means);
  const auto [pmin_it, pmax_it] = std::minmax_element(q.weights.begin(), q.weights.end());
  const double ratio = *pmin_it / *pmax_it;
  const bool hypothesis = ratio >= polarization_terms(k, q.sigma, eps, bt).proximity;

  double worst = 0.0;
  for (const ClusterVector& member : opt.members) {
    for (std::size_t j = 0; j < k; ++j) {
      double nearest = kInf;
      for (std::size_t i = 0; i < member.k(); ++i) {
        nearest = std::min(nearest, std::sqrt(squared_distance(q.means[j], member[i])));
      }
      worst = std::max(worst, nearest);
    }
  }
  const double B = min_cluster_separation(opt);
  const bool proximity = worst <= bt / 6.0;
  const bool bracket = !std::isfinite(bt) || (2.0 * bt / 3.0 <= B && B <= 4.0 * bt / 3.0);

  ConditionReport r;
  r.name = "mean_proximity";
  r.lhs = worst;
  r.rhs = bt / 6.0;
  r.pass = proximity && bracket;
  r.quantities = {{"hypothesis_holds", hypothesis ? 1.0 : 0.0},
                  {"max_mean_to_cluster_distance", worst},
                  {"mean_separation_Btilde", bt},
                  {"cluster_separation_B", B},
                  {"proximity_holds", proximity ? 1.0 : 0.0},
                  {"separation_bracket_holds", bracket ? 1.0 : 0.0}};
  if (!hypothesis) r.notes.push_back("weight ratio below the proximity term: informational only");
  return r;
}

DistanceLossRatio distance_loss_ratio(const ClusterVector& c, const SourceDistribution& dist,
                                      const OptimalSet& opt) {
  DistanceLossRatio out;
  out.loss = loss(c, opt, dist);
  out.squared_distance = nearest_optimal(c, opt).squared_distance;
  out.ratio = out.squared_distance / out.loss;
  return out;
}

MarginEstimate estimate_margin_constants(const SourceDistribution& dist, const OptimalSet& opt,
                                         std::size_t n_probe, std::uint64_t seed) {
  if (opt.members.empty()) throw PreconditionError("empty optimal set");
  const std::size_t k = opt.members.front().k();
  const std::size_t d = dist.dim();
  MarginEstimate est;
  est.seed = seed;
  est.probes = n_probe;
  for (std::size_t p = 0; p < n_probe; ++p) {
    Rng rng(derive_seed(seed, p));
    std::vector<double> coords;
    for (std::size_t i = 0; i < k; ++i) {
      if (d == 1) {
        coords.push_back(2.0 * rng.uniform() - 1.0);
      } else {
        const double r = std::sqrt(rng.uniform());
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        coords.push_back(r * std::cos(theta));
        coords.push_back(r * std::sin(theta));
      }
    }
    const ClusterVector c(d, std::move(coords));
    const double l = loss(c, opt, dist);
    if (l < 1e-9) {
      ++est.skipped_a1;
    } else {
      est.a1_lower_bound = std::max(est.a1_lower_bound, nearest_optimal(c, opt).squared_distance / l);
    }
    for (std::size_t m = 0; m < opt.members.size(); ++m) {
      OptimalSet single;
      single.members = {opt.members[m]};
      single.risk = opt.risk;
      const Alignment a = nearest_optimal(c, single);
      if (a.squared_distance < 1e-12) {
        ++est.skipped_a2;
        continue;
      }
      const double var = contrast_difference_variance(c, a.aligned, dist);
      est.a2_lower_bound = std::max(est.a2_lower_bound, var / a.squared_distance);
    }
  }
  return est;
}

}  // namespace vqlab
