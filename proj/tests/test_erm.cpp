#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "vqlab/distributions.hpp"
#include "vqlab/erm.hpp"
#include "vqlab/random.hpp"
#include "vqlab/risk.hpp"

using namespace vqlab;

namespace {

std::vector<double> sorted_centers(const ClusterVector& c) {
  std::vector<double> v(c.coords());
  std::sort(v.begin(), v.end());
  return v;
}

PointSet line_sample(Rng& rng, std::size_t n) {
  PointSet s(1, {});
  for (std::size_t t = 0; t < n; ++t) {
    const double x = rng.uniform();
    s.push_back(std::span<const double>(&x, 1));
  }
  return s;
}

bool same_center_set(const ClusterVector& a, const ClusterVector& b, double tol) {
  if (a.k() != b.k()) return false;
  std::vector<bool> used(b.k(), false);
  for (std::size_t i = 0; i < a.k(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < b.k() && !found; ++j) {
      if (!used[j] && squared_distance(a[i], b[j]) <= tol * tol) used[j] = found = true;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("exact one-dimensional k-means on hand examples") {
  const ErmResult two = kmeans_1d_exact(PointSet{{0.0}, {1.0}, {4.0}, {5.0}}, 2);
  CHECK(sorted_centers(two.centers) == std::vector<double>{0.5, 4.5});
  CHECK(two.risk == doctest::Approx(0.25));

  const ErmResult three = kmeans_1d_exact(PointSet{{1.0}, {2.0}, {3.0}}, 3);
  CHECK(sorted_centers(three.centers) == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(three.risk == 0.0);

  const ErmResult one = kmeans_1d_exact(PointSet{{0.0}, {10.0}}, 1);
  CHECK(one.centers[0][0] == 5.0);
  CHECK(one.risk == 25.0);
}

TEST_CASE("exact one-dimensional k-means agrees with exhaustive labeling") {
  Rng rng(2024);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + rng.index(11);
    const std::size_t k = 1 + rng.index(std::min<std::size_t>(3, n));
    const PointSet s = line_sample(rng, n);
    const ErmResult r = kmeans_1d_exact(s, k);
    CHECK(std::fabs(r.risk - oracle::exhaustive_kmeans_risk(s.coords(), k)) <= 1e-12);
    CHECK(r.risk == doctest::Approx(empirical_risk(r.centers, s)).epsilon(1e-12));
  }
}

TEST_CASE("exact one-dimensional k-means handles repeated points") {
  const ErmResult r = kmeans_1d_exact(PointSet{{0.3}, {0.3}, {0.3}, {0.7}, {0.7}}, 2);
  CHECK(sorted_centers(r.centers) == std::vector<double>{0.3, 0.7});
  CHECK(r.risk == 0.0);
  CHECK_THROWS(kmeans_1d_exact(PointSet{{0.0}, {1.0}}, 3));
  CHECK_THROWS_AS(kmeans_1d_exact(PointSet{{0.0, 0.0}}, 1), DimensionError);
}

TEST_CASE("Lloyd iterations") {
  const PointSet s{{0.0}, {1.0}, {4.0}, {5.0}};
  const ErmResult fixed = lloyd(s, ClusterVector{{0.5}, {4.5}});
  CHECK(fixed.iterations == 0);
  CHECK(fixed.centers == ClusterVector{{0.5}, {4.5}});

  const ErmResult traced = lloyd(s, ClusterVector{{0.0}, {5.0}});
  CHECK(traced.centers == ClusterVector{{0.5}, {4.5}});
  CHECK(traced.risk == doctest::Approx(0.25));
}

TEST_CASE("Lloyd never increases the empirical risk") {
  const auto dist = SourceDistribution::quasi_gaussian(PointSet{{-0.5, 0.0}, {0.5, 0.0}, {0.0, 0.5}},
                                                       {0.3, 0.3, 0.4}, 0.2);
  const PointSet s = dist.sample(1, 400);
  Rng rng(10);
  for (int t = 0; t < 20; ++t) {
    ClusterVector c = kmeanspp_init(s, 4, rng);
    double prev = empirical_risk(c, s);
    for (int step = 0; step < 30; ++step) {
      c = lloyd(s, c, 1).centers;
      const double now = empirical_risk(c, s);
      CHECK(now <= prev + 1e-15);
      prev = now;
    }
  }
}

TEST_CASE("multistart is deterministic and never beats the exact solution") {
  Rng rng(77);
  for (int t = 0; t < 30; ++t) {
    const PointSet s = line_sample(rng, 40);
    const ErmResult exact = kmeans_1d_exact(s, 3);
    const ErmResult ms = multistart_erm(s, 3, 5, 1000 + t);
    CHECK(exact.risk <= ms.risk + 1e-15);
    CHECK(ms.centers == multistart_erm(s, 3, 5, 1000 + t).centers);
  }
}

TEST_CASE("multistart finds the exact optimum on mixture projections") {
  const auto dist = SourceDistribution::ball_mixture(PointSet{{-0.6}, {0.0}, {0.5}}, 0.15);
  int hits = 0;
  const int seeds = 40;
  for (int seed = 0; seed < seeds; ++seed) {
    const PointSet s = dist.sample(seed, 500);
    const double exact = kmeans_1d_exact(s, 3).risk;
    const double ms = multistart_erm(s, 3, 50, seed).risk;
    hits += ms <= exact * (1.0 + 1e-9);
  }
  CHECK(hits >= 0.95 * seeds);
}

TEST_CASE("brute-force grid search") {
  const ErmResult r = brute_force_erm(PointSet{{0.0}, {1.0}, {4.0}, {5.0}}, 2, 11);
  CHECK(sorted_centers(r.centers) == std::vector<double>{0.5, 4.5});
  const ErmResult one = brute_force_erm(PointSet{{0.0}, {0.3}, {1.0}}, 1, 11);
  CHECK(one.centers[0][0] == doctest::Approx(0.4));

  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    const PointSet s = line_sample(rng, 6);
    const ErmResult exact = kmeans_1d_exact(s, 2);
    const ErmResult grid = brute_force_erm(s, 2, 201);
    CHECK(exact.risk <= grid.risk + 1e-15);
    const double lo = *std::min_element(s.coords().begin(), s.coords().end());
    const double hi = *std::max_element(s.coords().begin(), s.coords().end());
    const double step = (hi - lo) / 200.0;
    const auto a = sorted_centers(exact.centers);
    const auto b = sorted_centers(grid.centers);
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::fabs(a[j] - b[j]) <= step);
  }
  CHECK_THROWS_AS(brute_force_erm(PointSet{{0.0}, {1.0}}, 3, 100000), PreconditionError);
}

TEST_CASE("optimal clusters of the in-scope families") {
  const PointSet z{{0.5, 0.0}, {-0.25, 0.4330127018922193}, {-0.25, -0.4330127018922193}};
  const auto balls = SourceDistribution::ball_mixture(z, 0.05);
  const OptimalSet b = optimal_clusters(balls, 3);
  REQUIRE(b.members.size() == 1);
  CHECK(same_center_set(b.members[0], ClusterVector(2, z.coords()), 1e-6));

  const OptimalSet tail = optimal_clusters(SourceDistribution::tail_counterexample(2.0, 10.0), 3);
  REQUIRE(tail.members.size() == 1);
  CHECK(same_center_set(tail.members[0], ClusterVector{{1.0}, {11.0}, {21.0}}, 1e-9));
  CHECK(tail.risk == doctest::Approx(5.0 / 9.0).epsilon(1e-12));

  const OptimalSet u = optimal_clusters(SourceDistribution::ball_mixture(PointSet{{0.5}}, 0.5), 2);
  REQUIRE(u.members.size() == 1);
  CHECK(same_center_set(u.members[0], ClusterVector{{0.25}, {0.75}}, 1e-9));
  CHECK(u.risk == doctest::Approx(1.0 / 48.0).epsilon(1e-12));
}

TEST_CASE("optimal clusters do not depend on the component order") {
  const auto a = SourceDistribution::quasi_gaussian(PointSet{{-0.5, 0.0}, {0.4, 0.1}, {0.0, -0.5}},
                                                    {0.3, 0.3, 0.4}, 0.1);
  const auto b = SourceDistribution::quasi_gaussian(PointSet{{0.0, -0.5}, {-0.5, 0.0}, {0.4, 0.1}},
                                                    {0.4, 0.3, 0.3}, 0.1);
  const OptimalSet oa = optimal_clusters(a, 3);
  const OptimalSet ob = optimal_clusters(b, 3);
  REQUIRE(oa.members.size() == ob.members.size());
  CHECK(oa.risk == doctest::Approx(ob.risk).epsilon(1e-9));
  for (const ClusterVector& m : oa.members) {
    bool matched = false;
    for (const ClusterVector& n : ob.members) matched = matched || same_center_set(m, n, 1e-6);
    CHECK(matched);
  }
}

TEST_CASE("optimal clusters satisfy the centroid condition") {
  const auto mix = SourceDistribution::quasi_gaussian(PointSet{{-0.3, 0.0}, {0.3, 0.1}}, {0.4, 0.6}, 0.25);
  const OptimalSet opt = optimal_clusters(mix, 3);
  for (const ClusterVector& c : opt.members) {
    CHECK(max_norm(expected_gradient(c, mix)) <= 1e-6);
    CHECK(true_risk(c, mix) == doctest::Approx(opt.risk).epsilon(1e-9));
  }
}
