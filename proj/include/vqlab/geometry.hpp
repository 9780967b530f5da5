#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "vqlab/quadrature.hpp"
#include "vqlab/types.hpp"

namespace vqlab {

class SourceDistribution;

using Point2 = std::array<double, 2>;

/// Index of the nearest cluster; ties go to the lowest index.
std::size_t assign(const ClusterVector& c, std::span<const double> x);

// Throws GeometryError for d outside {1, 2} or a repeated cluster.
void require_supported_dimension(std::size_t d);
void require_distinct(const ClusterVector& c);

// ---------------------------------------------------------------- d = 1 --

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(hi > lo); }
};

/// Voronoi cells of a one-dimensional codebook as intervals of the real
/// line. A repeated cluster keeps the cell of its lowest-index copy; the
/// others get an empty interval.
std::vector<Interval> voronoi_intervals(const ClusterVector& c);

// ---------------------------------------------------------------- d = 2 --

/// { x : normal . x <= offset }.
struct HalfPlane {
  Point2 normal{};
  double offset = 0.0;

  double slack(const Point2& x) const {
    return offset - (normal[0] * x[0] + normal[1] * x[1]);
  }
};

/// Points at least as close to `own` as to `other`.
HalfPlane bisector_halfplane(std::span<const double> own, std::span<const double> other);

/// Bounded convex polygon kept both as its constraint list and as its
/// counter-clockwise vertex loop.
class ConvexPolygon {
 public:
  static ConvexPolygon square(double half_width);

  void clip(const HalfPlane& h);

  bool empty() const { return vertices_.size() < 3; }
  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<HalfPlane>& constraints() const { return constraints_; }
  bool contains(const Point2& x, double tol = 0.0) const;
  double area() const;

  // Parameter range [t0, t1] of the ray z + t*u (t unrestricted in sign)
  // that lies inside the polygon; returns false when the line misses it.
  bool ray_range(const Point2& z, const Point2& u, double& t0, double& t1) const;

 private:
  std::vector<HalfPlane> constraints_;
  std::vector<Point2> vertices_;
};

/// Half-width of the square every planar cell is clipped to. It contains
/// the unit ball, the support of every planar distribution.
inline constexpr double kPlanarWindow = 2.0;

/// Voronoi cell of cluster i, clipped to the planar window.
ConvexPolygon voronoi_cell(const ClusterVector& c, std::size_t i);

// ------------------------------------------------------------ faces ------

/// Common face of cells i < j. In d = 1 the face is the single midpoint
/// (a == b) with unit counting measure; in d = 2 it is the segment [a, b].
struct BoundaryFace {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t dim = 1;
  Point2 a{};
  Point2 b{};

  double measure() const;
  Point2 point_at(double s) const {  // s in [0, 1]
    return {a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])};
  }
};

/// Nonempty faces of the Voronoi diagram restricted to the closed ball
/// B(0, support_radius). Pass infinity to keep every face (d = 1 only).
std::vector<BoundaryFace> boundary_faces(const ClusterVector& c, double support_radius = 1.0);

/// Integral of g over a face with respect to the (d-1)-dimensional measure.
/// g maps a point (as a span of length d) to Values<N>.
template <std::size_t N, class G>
Values<N> surface_integral(const BoundaryFace& face, G&& g, const QuadratureTolerance& tol = {}) {
  if (face.dim == 1) {
    const double x = face.a[0];
    const Values<N> v = g(std::span<const double>(&x, 1));
    if (!all_finite(v)) throw QuadratureError("non-finite integrand value on a face");
    return v;
  }
  const double len = face.measure();
  auto along = [&](double s) {
    const Point2 p = face.point_at(s);
    return g(std::span<const double>(p.data(), 2));
  };
  Values<N> unit = integrate_refined<N>(along, 0.0, 1.0, 10, tol.rel_1d, tol.abs_floor);
  for (double& v : unit) v *= len;
  return unit;
}

/// Probability of cell i under `dist` (see integration.hpp for the
/// machinery).
double cell_mass(const ClusterVector& c, std::size_t i, const SourceDistribution& dist);

}  // namespace vqlab
