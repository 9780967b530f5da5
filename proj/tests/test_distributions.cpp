#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "vqlab/distributions.hpp"
#include "vqlab/integration.hpp"

using namespace vqlab;

namespace {

double density_at(const SourceDistribution& dist, double x) {
  return dist.density(std::span<const double>(&x, 1));
}

double density_at(const SourceDistribution& dist, double x, double y) {
  const double p[2] = {x, y};
  return dist.density(p);
}

SourceDistribution tail() { return SourceDistribution::tail_counterexample(2.0, 10.0); }

}  // namespace

TEST_CASE("ball mixture density") {
  const auto dist = SourceDistribution::ball_mixture(PointSet{{-0.5, 0.0}, {0.5, 0.0}}, 0.05);
  CHECK(density_at(dist, 0.5, 0.0) == doctest::Approx(1.0 / (2.0 * std::numbers::pi * 0.0025)));
  CHECK(density_at(dist, 0.5, 0.0) == doctest::Approx(63.66).epsilon(1e-3));
  CHECK(density_at(dist, 0.0, 0.0) == 0.0);
}

TEST_CASE("tail counterexample density") {
  const auto dist = tail();
  CHECK(density_at(dist, 1.0) == doctest::Approx(1.0 / 6.0));
  CHECK(density_at(dist, 11.0) == doctest::Approx(1.0 / 6.0));
  CHECK(density_at(dist, 25.0) == doctest::Approx(std::exp(-5.0) / 3.0).epsilon(1e-12));
  CHECK(density_at(dist, 25.0) == doctest::Approx(0.002245).epsilon(1e-3));
  CHECK(density_at(dist, 5.0) == 0.0);
  CHECK(density_at(dist, -1.0) == 0.0);
}

TEST_CASE("atomic laws have no density") {
  const auto atoms = SourceDistribution::finite_atoms(PointSet{{0.0}, {1.0}}, {0.5, 0.5});
  CHECK(atoms.is_atomic());
  CHECK_THROWS_AS(density_at(atoms, 0.0), PreconditionError);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS(SourceDistribution::ball_mixture(PointSet{{0.0, 0.0}}, 0.0));
  CHECK_THROWS(SourceDistribution::ball_mixture(PointSet{{0.9, 0.0}}, 0.2));
  CHECK_THROWS(SourceDistribution::quasi_gaussian(PointSet{{0.0, 0.0}, {0.5, 0.0}}, {0.6, 0.6}, 0.1));
  CHECK_THROWS(SourceDistribution::quasi_gaussian(PointSet{{0.0, 0.0}}, {1.0}, -0.1));
  CHECK_THROWS(SourceDistribution::finite_atoms(PointSet{{0.0}, {1.0}}, {0.5, 0.6}));
}

TEST_CASE("normalizers follow the centered radial closed form") {
  const auto narrow = normalizers(PointSet{{0.0, 0.0}}, 0.1);
  CHECK(narrow.values[0] == doctest::Approx(1.0).epsilon(1e-15));
  const auto wide = normalizers(PointSet{{0.0, 0.0}}, 1.0);
  CHECK(wide.values[0] == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-10));
  CHECK(wide.values[0] == doctest::Approx(0.39347).epsilon(1e-4));
  CHECK(wide.epsilon == doctest::Approx(std::exp(-0.5)).epsilon(1e-10));

  // Off-center mean: against a polar Simpson oracle over the unit disk.
  const double sigma = 0.3;
  const auto off = normalizers(PointSet{{0.4, -0.2}}, sigma);
  const double ref = oracle::disk_integral(
      [&](double x, double y) {
        const double r2 = (x - 0.4) * (x - 0.4) + (y + 0.2) * (y + 0.2);
        return std::exp(-r2 / (2.0 * sigma * sigma)) / (2.0 * std::numbers::pi * sigma * sigma);
      },
      0.0, 0.0, oracle::kUnitDisk);
  CHECK(off.values[0] == doctest::Approx(ref).epsilon(1e-7));

  double last = 0.0;
  for (double s : {0.4, 0.2, 0.1, 0.05}) {
    const auto n = normalizers(PointSet{{0.3, 0.3}}, s);
    CHECK(n.values[0] > last);
    CHECK(n.values[0] <= 1.0);
    last = n.values[0];
  }
  CHECK(1.0 - last < 1e-12);
}

TEST_CASE("continuous laws integrate to one") {
  const auto balls = SourceDistribution::ball_mixture(PointSet{{0.3, 0.2}, {-0.4, -0.1}}, 0.25);
  double total = 0.0;
  for (const auto& z : {std::array<double, 2>{0.3, 0.2}, std::array<double, 2>{-0.4, -0.1}}) {
    total += oracle::disk_integral([&](double x, double y) { return density_at(balls, x, y); }, z[0], z[1],
                                   0.25 * (1.0 - 1e-12));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));

  const auto mix = SourceDistribution::quasi_gaussian(PointSet{{-0.3, 0.0}, {0.3, 0.1}}, {0.4, 0.6}, 0.2);
  const double mix_total =
      oracle::disk_integral([&](double x, double y) { return density_at(mix, x, y); }, 0.0, 0.0, oracle::kUnitDisk);
  CHECK(mix_total == doctest::Approx(1.0).epsilon(1e-6));

  const double tail_total = oracle::tail_expectation([](double) { return 1.0; });
  CHECK(tail_total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("second moments") {
  CHECK(tail().second_moment() == doctest::Approx(1694.0 / 9.0).epsilon(1e-12));
  CHECK(oracle::tail_expectation([](double x) { return x * x; }) == doctest::Approx(1694.0 / 9.0).epsilon(1e-8));
  CHECK(SourceDistribution::ball_mixture(PointSet{{0.5}}, 0.5).second_moment() ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(SourceDistribution::finite_atoms(PointSet{{0.0}}, {1.0}).second_moment() == 0.0);

  const auto mix = SourceDistribution::quasi_gaussian(PointSet{{-0.3, 0.0}, {0.3, 0.1}}, {0.4, 0.6}, 0.2);
  const double ref = oracle::disk_integral(
      [&](double x, double y) { return (x * x + y * y) * density_at(mix, x, y); }, 0.0, 0.0, oracle::kUnitDisk);
  CHECK(mix.second_moment() == doctest::Approx(ref).epsilon(1e-7));
}

TEST_CASE("tail sample puts a third of its mass on the first piece") {
  const std::size_t n = 100000;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const PointSet s = tail().sample(seed, n);
    std::size_t first = 0;
    for (std::size_t t = 0; t < n; ++t) first += s[t][0] >= 0.0 && s[t][0] <= 2.0;
    const double p = static_cast<double>(first) / n;
    const double se = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / n);
    CHECK(std::fabs(p - 1.0 / 3.0) <= 3.0 * se);
  }
}

TEST_CASE("ball mixture samples stay in their balls") {
  const PointSet z{{0.5, 0.0}, {-0.25, 0.433}, {-0.25, -0.433}};
  const auto dist = SourceDistribution::ball_mixture(z, 0.05);
  const PointSet s = dist.sample(9, 10000);
  for (std::size_t t = 0; t < s.size(); ++t) {
    double best = 1e9;
    for (std::size_t j = 0; j < z.size(); ++j) best = std::min(best, squared_distance(s[t], z[j]));
    CHECK(std::sqrt(best) <= 0.05 + 1e-15);
  }
}

TEST_CASE("sampling is deterministic in the seed") {
  const auto mix = SourceDistribution::quasi_gaussian(PointSet{{-0.5, 0.0}, {0.5, 0.0}}, {0.5, 0.5}, 0.1);
  CHECK(mix.sample(42, 500) == mix.sample(42, 500));
  CHECK_FALSE(mix.sample(42, 500) == mix.sample(43, 500));
  CHECK(tail().sample(7, 100) == tail().sample(7, 100));
}

TEST_CASE("sample means match quadrature means") {
  const std::size_t n = 100000;
  const QuadratureTolerance tol;
  const std::vector<SourceDistribution> laws = {
      SourceDistribution::ball_mixture(PointSet{{0.3, 0.2}, {-0.4, -0.1}}, 0.25),
      SourceDistribution::quasi_gaussian(PointSet{{-0.3, 0.0}, {0.3, 0.1}}, {0.4, 0.6}, 0.2), tail()};
  for (const SourceDistribution& dist : laws) {
    const std::size_t d = dist.dim();
    ClusterVector origin(d, std::vector<double>(d, 0.0));
    const CellMoments m = cell_moments(origin, dist, tol)[0];
    const PointSet s = dist.sample(17, n);
    for (std::size_t a = 0; a < d; ++a) {
      double sum = 0.0;
      double sq = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        sum += s[t][a];
        sq += s[t][a] * s[t][a];
      }
      const double mean = sum / n;
      const double sd = std::sqrt(sq / n - mean * mean);
      CHECK(std::fabs(mean - m.first[a]) <= 4.0 * sd / std::sqrt(static_cast<double>(n)));
    }
  }
}
