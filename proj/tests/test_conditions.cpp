#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vqlab/conditions.hpp"
#include "vqlab/erm.hpp"
#include "vqlab/hessian.hpp"

using namespace vqlab;

namespace {

SourceDistribution two_poles(double sigma) {
  return SourceDistribution::quasi_gaussian(PointSet{{-0.5, 0.0}, {0.5, 0.0}}, {0.5, 0.5}, sigma);
}

SourceDistribution ring_balls(std::size_t k, double rho, double radius = 0.5) {
  PointSet z(2, {});
  for (std::size_t j = 0; j < k; ++j) {
    const double t = 2.0 * std::numbers::pi * j / k;
    const double p[2] = {radius * std::cos(t), radius * std::sin(t)};
    z.push_back(p);
  }
  return SourceDistribution::ball_mixture(z, rho);
}

double first_term(double k, double sigma, double eps, double bt) {
  const double s2 = sigma * sigma;
  return 288.0 * k * s2 / ((1.0 - eps) * bt * bt * (1.0 - std::exp(-bt * bt / (288.0 * s2))));
}

double second_term(double k, double sigma, double eps, double bt) {
  const double s2 = sigma * sigma;
  return 96.0 * k / ((1.0 - eps) * s2 * bt * (std::exp(bt / (72.0 * s2)) - 1.0));
}

}  // namespace

TEST_CASE("boundary density threshold arithmetic") {
  CHECK(boundary_density_threshold(2, 1.0, 0.5) == doctest::Approx(1.0 / (256.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(boundary_density_threshold(2, 1.0, 0.5) == doctest::Approx(1.2434e-3).epsilon(1e-4));
  // d = 1: Gamma(1/2) = sqrt(pi) cancels pi^{1/2}, leaving B m / 64.
  CHECK(boundary_density_threshold(1, 0.8, 0.25) == doctest::Approx(0.8 * 0.25 / 64.0).epsilon(1e-14));
}

TEST_CASE("boundary density bound on separated and merged laws") {
  const auto balls = ring_balls(3, 0.05);
  const auto pass = check_boundary_density_bound(balls, optimal_clusters(balls, 3));
  CHECK(pass.pass);
  CHECK(pass.lhs == 0.0);

  const auto merged = two_poles(0.3);
  const auto fail = check_boundary_density_bound(merged, optimal_clusters(merged, 2));
  CHECK_FALSE(fail.pass);
  CHECK(fail.lhs > fail.rhs);

  // Uniform [0, 1] with k = 2: the density at the midpoint is 1.
  const auto uniform = SourceDistribution::ball_mixture(PointSet{{0.5}}, 0.5);
  const auto u = check_boundary_density_bound(uniform, optimal_clusters(uniform, 2));
  CHECK(u.lhs == doctest::Approx(1.0));
  CHECK(u.rhs == doctest::Approx(0.5 * 0.5 / 64.0));
  CHECK_FALSE(u.pass);

  const auto atoms = SourceDistribution::finite_atoms(PointSet{{0.0}, {1.0}}, {0.5, 0.5});
  CHECK_THROWS_AS(check_boundary_density_bound(atoms, OptimalSet{{ClusterVector{{0.0}, {1.0}}}, 0.0}),
                  PreconditionError);
  CHECK_THROWS_AS(check_boundary_density_bound(balls, OptimalSet{}), PreconditionError);
}

TEST_CASE("ball separation arithmetic") {
  const auto pass = check_ball_separation(0.05, 0.5, 2);
  CHECK(pass.pass);
  CHECK(pass.rhs == doctest::Approx(0.01));
  CHECK(pass.lhs == doctest::Approx(0.0025));

  const auto fail = check_ball_separation(0.08, 0.5, 2);
  CHECK_FALSE(fail.pass);
  CHECK(fail.rhs == doctest::Approx(1e-4));
  CHECK(fail.lhs == doctest::Approx(0.0064));

  for (double rho : {1e-3, 1e-6, 1e-9}) CHECK(check_ball_separation(rho, 0.5, 2).pass);
  // Both sides equal but R/2 < 3 rho.
  CHECK_FALSE(check_ball_separation(0.1, 0.2, 1).pass);

  CHECK(check_ball_separation(ring_balls(3, 0.05)).pass);
  CHECK_FALSE(check_ball_separation(ring_balls(2, 0.08, 0.25)).pass);
}

TEST_CASE("polarization terms against direct evaluation") {
  const auto t = polarization_terms(2, 0.01, 0.01, 1.0);
  CHECK(t.proximity == doctest::Approx(first_term(2, 0.01, 0.01, 1.0)).epsilon(1e-12));
  CHECK(t.proximity == doctest::Approx(0.0582).epsilon(1e-3));
  CHECK(t.boundary < 1e-40);

  const auto wide = polarization_terms(2, 0.05, 0.01, 1.0);
  CHECK(wide.proximity == doctest::Approx(1.94).epsilon(2e-3));
  CHECK(wide.boundary == doctest::Approx(second_term(2, 0.05, 0.01, 1.0)).epsilon(1e-12));
}

TEST_CASE("mixture polarization checker") {
  const auto narrow = check_mixture_polarization(two_poles(0.01));
  CHECK(narrow.pass);
  CHECK(narrow.rhs == 1.0);
  CHECK(narrow.quantities.at("epsilon") <= 0.01);
  CHECK(narrow.quantities.at("proximity_term") ==
        doctest::Approx(first_term(2, 0.01, narrow.quantities.at("epsilon"), 1.0)).epsilon(1e-12));
  CHECK(narrow.quantities.at("boundary_term") < 1e-40);

  const auto wide = check_mixture_polarization(two_poles(0.05));
  CHECK_FALSE(wide.pass);
  CHECK(wide.quantities.at("proximity_term") > 1.0);
  CHECK(wide.quantities.count("boundary_term") == 1);

  // Unequal weights below the proximity term.
  const auto skewed = SourceDistribution::quasi_gaussian(PointSet{{-0.5, 0.0}, {0.5, 0.0}}, {0.02, 0.98}, 0.01);
  CHECK_FALSE(check_mixture_polarization(skewed).pass);
}

TEST_CASE("optimal clusters sit near the mixture means") {
  const auto mix = two_poles(0.01);
  const OptimalSet opt = optimal_clusters(mix, 2);
  const auto r = verify_mean_proximity(mix, opt);
  CHECK(r.pass);
  CHECK(r.quantities.at("hypothesis_holds") == 1.0);
  CHECK(r.lhs <= 1.0 / 6.0);
  CHECK(r.lhs <= 0.01);
  const double B = r.quantities.at("cluster_separation_B");
  CHECK(B >= 2.0 / 3.0);
  CHECK(B <= 4.0 / 3.0);

  const auto single = SourceDistribution::quasi_gaussian(PointSet{{0.2, -0.1}}, {1.0}, 0.1);
  const OptimalSet one = optimal_clusters(single, 1);
  CHECK(std::sqrt(squared_distance(one.members[0][0], PointSet{{0.2, -0.1}}[0])) <= 1e-8);

  const auto wide = two_poles(0.05);
  const auto info = verify_mean_proximity(wide, optimal_clusters(wide, 2));
  CHECK(info.quantities.at("hypothesis_holds") == 0.0);
  CHECK_FALSE(info.notes.empty());
}

TEST_CASE("passing the boundary bound gives positive definite Hessians") {
  const std::vector<SourceDistribution> laws = {ring_balls(2, 0.05), ring_balls(3, 0.05), ring_balls(4, 0.1, 0.6),
                                                two_poles(0.01)};
  const std::vector<std::size_t> ks = {2, 3, 4, 2};
  for (std::size_t m = 0; m < laws.size(); ++m) {
    const OptimalSet opt = optimal_clusters(laws[m], ks[m]);
    REQUIRE(check_boundary_density_bound(laws[m], opt).pass);
    for (const ClusterVector& c : opt.members) {
      const auto v = is_positive_definite(analytic_hessian(c, laws[m]));
      CHECK(v.positive_definite);
      CHECK(v.min_eigenvalue > 1e-6);
    }
  }
}

TEST_CASE("margin constants on uniform [0,1]") {
  const auto uniform = SourceDistribution::ball_mixture(PointSet{{0.5}}, 0.5);
  const OptimalSet opt = optimal_clusters(uniform, 2);
  const auto ratio = distance_loss_ratio(ClusterVector{{0.3}, {0.75}}, uniform, opt);
  CHECK(ratio.loss > 0.0);
  CHECK(std::isfinite(ratio.ratio));
  CHECK(ratio.ratio > 0.0);

  const auto est = estimate_margin_constants(uniform, opt, 500, 1);
  CHECK(est.probes == 500);
  CHECK(std::isfinite(est.a1_lower_bound));
  CHECK(std::isfinite(est.a2_lower_bound));
  CHECK(est.a1_lower_bound > 0.0);
  CHECK(est.a2_lower_bound > 0.0);
  CHECK(est.a2_lower_bound < 1e3);

  const auto again = estimate_margin_constants(uniform, opt, 500, 1);
  CHECK(again.a1_lower_bound == est.a1_lower_bound);
  CHECK(again.a2_lower_bound == est.a2_lower_bound);

  // An optimal probe carries no loss and is skipped by both estimates.
  const auto exact = estimate_margin_constants(
      SourceDistribution::finite_atoms(PointSet{{0.0}}, {1.0}),
      OptimalSet{{ClusterVector{{0.0}}}, 0.0}, 0, 1);
  CHECK(exact.a1_lower_bound == 0.0);
}

TEST_CASE("the distance-to-loss ratio is unbounded without bounded support") {
  const auto tail = SourceDistribution::tail_counterexample(2.0, 10.0);
  const OptimalSet opt = optimal_clusters(tail, 3);
  double previous = 0.0;
  for (double n : {50.0, 100.0, 200.0, 400.0, 800.0}) {
    const auto r = distance_loss_ratio(ClusterVector{{0.0}, {n}, {n * n}}, tail, opt);
    // Doubling n multiplies the ratio by at least 2^3.
    if (previous > 0.0) CHECK(r.ratio / previous >= 8.0);
    previous = r.ratio;
  }
}

TEST_CASE("condition reports are reproducible") {
  const auto mix = two_poles(0.05);
  const OptimalSet opt = optimal_clusters(mix, 2);
  const auto a = check_boundary_density_bound(mix, opt);
  const auto b = check_boundary_density_bound(mix, opt);
  CHECK(a.lhs == b.lhs);
  CHECK(a.rhs == b.rhs);
  CHECK(a.quantities == b.quantities);
}
