#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vqlab/geometry.hpp"
#include "vqlab/quadrature.hpp"
#include "vqlab/types.hpp"

namespace vqlab {

/// k balls of common radius, each carrying mass 1/k uniformly.
struct BallMixture {
  PointSet centers;
  double radius = 0.0;
};

/// Planar Gaussian mixture with common variance, truncated to the unit ball
/// and renormalized component-wise.
struct QuasiGaussianMixture {
  PointSet means;
  std::vector<double> weights;
  double sigma = 0.0;
  std::vector<double> normalizers;  // filled at construction
};

/// One-dimensional law with two flat pieces of mass 1/3 on [0, eta] and
/// [R, R + eta] and an exponential tail of mass 1/3 beyond
/// 2R - 1 + eta/2.
struct TailCounterexample {
  double eta = 2.0;
  double R = 10.0;

  double tail_start() const { return 2.0 * R - 1.0 + 0.5 * eta; }
  // log q(eta) with q(eta) = exp(eta/2 + 2R - 1) / 3.
  double log_q() const { return 0.5 * eta + 2.0 * R - 1.0 - std::log(3.0); }
};

struct FiniteAtoms {
  PointSet atoms;
  std::vector<double> probabilities;
};

/// A piece of a one-dimensional density: `value` on [lo, hi] if flat,
/// exp(value - x) on [lo, hi] if exponential (hi may be +inf).
struct DensityPiece {
  double lo = 0.0;
  double hi = 0.0;
  bool exponential = false;
  double value = 0.0;

  double at(double x) const {
    if (x < lo || x > hi) return 0.0;
    return exponential ? std::exp(value - x) : value;
  }
};

/// A radially structured planar component: density `amplitude` on the disk
/// B(center, cap) when flat, amplitude * exp(-|x - center|^2 / 2 sigma^2)
/// restricted to the unit ball when Gaussian. Gaussian caps are set where
/// the kernel underflows.
struct RadialComponent {
  Point2 center{};
  double cap = 0.0;
  bool gaussian = false;
  double amplitude = 0.0;
  double sigma = 0.0;
};

class SourceDistribution {
 public:
  using Variant = std::variant<BallMixture, QuasiGaussianMixture, TailCounterexample, FiniteAtoms>;

  static SourceDistribution ball_mixture(PointSet centers, double radius);
  static SourceDistribution quasi_gaussian(PointSet means, std::vector<double> weights,
                                           double sigma);
  static SourceDistribution tail_counterexample(double eta = 2.0, double R = 10.0);
  static SourceDistribution finite_atoms(PointSet atoms, std::vector<double> probabilities);

  const Variant& variant() const { return variant_; }
  std::string kind() const;
  std::size_t dim() const { return dim_; }

  bool has_density() const { return !std::holds_alternative<FiniteAtoms>(variant_); }
  bool is_atomic() const { return !has_density(); }
  // Radius of the smallest centered ball known to hold the support.
  double support_radius() const;

  double density(std::span<const double> x) const;

  PointSet sample(std::uint64_t seed, std::size_t n) const;

  double second_moment() const;

  /// Parameters s in (0, 1), sorted, where the density restricted to the
  /// planar face is not smooth (ball boundaries).
  std::vector<double> density_breaks(const BoundaryFace& face) const;

  /// Natural seeds for population Lloyd: ball centers, mixture means,
  /// piece means, or atoms.
  PointSet component_centers() const;

  // Integration structure. pieces() is populated for continuous laws on the
  // line, components() for continuous planar laws.
  const std::vector<DensityPiece>& pieces() const { return pieces_; }
  const std::vector<RadialComponent>& components() const { return components_; }

 private:
  SourceDistribution(Variant v, std::size_t dim);
  void build_structure();
  void check_total_mass() const;

  Variant variant_;
  std::size_t dim_ = 1;
  std::vector<DensityPiece> pieces_;
  std::vector<RadialComponent> components_;
};

struct Normalizers {
  std::vector<double> values;
  double epsilon = 0.0;  // 1 - min values
};

/// N_i = (2 pi sigma^2)^{-1} * integral over B(0,1) of the i-th Gaussian
/// kernel, and epsilon = 1 - min_i N_i.
Normalizers normalizers(const PointSet& means, double sigma,
                        const QuadratureTolerance& tol = {});

/// Smallest pairwise distance between the points (infinity for one point).
double min_pairwise_distance(const PointSet& points);

/// Volume of the unit ball in R^d.
double unit_ball_volume(std::size_t d);

}  // namespace vqlab
