#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "vqlab/distributions.hpp"
#include "vqlab/geometry.hpp"
#include "vqlab/quadrature.hpp"

namespace vqlab {

// ------------------------------------------------------------- d = 1 ----

/// p(x) = sum_j coef[j] * (x - shift)^j.
struct ShiftedPolynomial {
  double shift = 0.0;
  std::array<double, 5> coef{};
};

/// Exact integral of p times the piecewise density over [lo, hi].
double integrate_polynomial(const std::vector<DensityPiece>& pieces, const ShiftedPolynomial& p,
                            double lo, double hi);

// ------------------------------------------------------------- d = 2 ----

namespace detail {

void circle_segment_angles(const Point2& z, const Point2& center, double radius, const Point2& p,
                           const Point2& q, std::vector<double>& angles);
void circle_circle_angles(const Point2& z, const Point2& c1, double r1, const Point2& c2,
                          double r2, std::vector<double>& angles);
double distance_to_polygon(const ConvexPolygon& poly, const Point2& z);

// Breakpoints in angle (seen from comp.center) where the radial range of
// region ∩ support stops being smooth.
std::vector<double> break_angles(const ConvexPolygon& region, const RadialComponent& comp);

}  // namespace detail

/// Integral over `region` of g(x) times the density of one planar component.
///
/// Polar coordinates around the component center: the radial range of the
/// convex region along each ray is exact, the radial integral uses
/// Gauss-Legendre panels (polynomial-exact for flat components), and the
/// angular integral is locally adaptive between breakpoints.
template <std::size_t N, class G>
Values<N> integrate_component(const ConvexPolygon& region, const RadialComponent& comp, G&& g,
                              const QuadratureTolerance& tol, double scale) {
  Values<N> total{};
  if (region.empty()) return total;
  if (detail::distance_to_polygon(region, comp.center) >= comp.cap) return total;

  const Point2 z = comp.center;
  const double zz = z[0] * z[0] + z[1] * z[1];
  const GaussRule& radial = gauss_legendre(comp.gaussian ? 10 : 8);
  const double panel_width = comp.gaussian ? 1.5 * comp.sigma : comp.cap;
  const double inv_two_var = comp.gaussian ? 0.5 / (comp.sigma * comp.sigma) : 0.0;

  auto ray = [&](double theta) {
    Values<N> acc{};
    const Point2 e{std::cos(theta), std::sin(theta)};
    double t0 = 0.0;
    double t1 = 0.0;
    if (!region.ray_range(z, e, t0, t1)) return acc;
    double lo = std::max(0.0, t0);
    double hi = std::min(t1, comp.cap);
    if (comp.gaussian) {
      const double b = z[0] * e[0] + z[1] * e[1];
      const double disc = b * b - zz + 1.0;
      if (disc <= 0.0) return acc;
      hi = std::min(hi, -b + std::sqrt(disc));
    }
    if (!(hi > lo)) return acc;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel_width)));
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * h;
      for (std::size_t q = 0; q < radial.nodes.size(); ++q) {
        const double r = mid + 0.5 * h * radial.nodes[q];
        const Point2 x{z[0] + r * e[0], z[1] + r * e[1]};
        double w = comp.amplitude * r * 0.5 * h * radial.weights[q];
        if (comp.gaussian) w *= std::exp(-r * r * inv_two_var);
        add_scaled(acc, w, g(std::span<const double>(x.data(), 2)));
      }
    }
    return acc;
  };

  std::vector<double> angles = detail::break_angles(region, comp);
  const double start = angles.empty() ? 0.0 : angles.front();
  angles.push_back(start + 2.0 * std::numbers::pi);
  if (angles.size() == 1) angles.insert(angles.begin(), start);
  for (std::size_t s = 0; s + 1 < angles.size(); ++s) {
    const double a = angles[s];
    const double b = angles[s + 1];
    if (!(b - a > 1e-15)) continue;
    const Values<N> part = integrate_adaptive<N>(ray, a, b, 10, tol.rel_2d, tol.abs_floor, scale,
                                                 tol.max_depth);
    for (std::size_t t = 0; t < N; ++t) total[t] += part[t];
  }
  return total;
}

/// Integral of g dP over a convex planar region for a continuous planar law.
template <std::size_t N, class G>
Values<N> integrate_region(const SourceDistribution& dist, const ConvexPolygon& region, G&& g,
                           const QuadratureTolerance& tol = {}) {
  Values<N> total{};
  for (const RadialComponent& comp : dist.components()) {
    const double mass_scale = comp.gaussian
                                  ? comp.amplitude * 2.0 * std::numbers::pi * comp.sigma * comp.sigma
                                  : comp.amplitude * std::numbers::pi * comp.cap * comp.cap;
    const Values<N> part = integrate_component<N>(region, comp, g, tol, mass_scale);
    for (std::size_t t = 0; t < N; ++t) total[t] += part[t];
  }
  return total;
}

/// Mass, first moment and second moment of each Voronoi cell, all taken
/// relative to the cell's own cluster:
///   mass = P(V_i), first = P[(x - c_i) 1_{V_i}], second = P[|x - c_i|^2 1_{V_i}].
struct CellMoments {
  double mass = 0.0;
  Point2 first{};
  double second = 0.0;
};

std::vector<CellMoments> cell_moments(const ClusterVector& c, const SourceDistribution& dist,
                                      const QuadratureTolerance& tol = {});

}  // namespace vqlab
