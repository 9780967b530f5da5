#include "vqlab/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace vqlab {

std::size_t assign(const ClusterVector& c, std::span<const double> x) {
  if (x.size() != c.dim()) throw DimensionError("point and codebook dimensions differ");
  std::size_t best = 0;
  double best_d = squared_distance(c[0], x);
  for (std::size_t j = 1; j < c.k(); ++j) {
    const double dj = squared_distance(c[j], x);
    if (dj < best_d) {
      best_d = dj;
      best = j;
    }
  }
  return best;
}

void require_supported_dimension(std::size_t d) {
  if (d != 1 && d != 2) {
    throw GeometryError("only dimensions 1 and 2 are supported, got " + std::to_string(d));
  }
}

void require_distinct(const ClusterVector& c) {
  for (std::size_t i = 0; i < c.k(); ++i) {
    for (std::size_t j = i + 1; j < c.k(); ++j) {
      if (squared_distance(c[i], c[j]) == 0.0) {
        throw GeometryError("clusters " + std::to_string(i) + " and " + std::to_string(j) +
                            " coincide");
      }
    }
  }
}

std::vector<Interval> voronoi_intervals(const ClusterVector& c) {
  if (c.dim() != 1) throw DimensionError("voronoi_intervals needs a one-dimensional codebook");
  const std::size_t k = c.k();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return c[a][0] < c[b][0]; });

  // Representatives: first (lowest index) copy of every distinct value.
  std::vector<std::size_t> reps;
  for (std::size_t idx : order) {
    if (reps.empty() || c[reps.back()][0] != c[idx][0]) reps.push_back(idx);
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<Interval> cells(k, Interval{0.0, 0.0});
  for (std::size_t m = 0; m < reps.size(); ++m) {
    const double v = c[reps[m]][0];
    const double lo = m == 0 ? -inf : 0.5 * (c[reps[m - 1]][0] + v);
    const double hi = m + 1 == reps.size() ? inf : 0.5 * (v + c[reps[m + 1]][0]);
    cells[reps[m]] = Interval{lo, hi};
  }
  return cells;
}

HalfPlane bisector_halfplane(std::span<const double> own, std::span<const double> other) {
  // |x - own|^2 <= |x - other|^2  <=>  2 x.(other - own) <= |other|^2 - |own|^2
  HalfPlane h;
  h.normal = {2.0 * (other[0] - own[0]), 2.0 * (other[1] - own[1])};
  h.offset = (other[0] * other[0] + other[1] * other[1]) - (own[0] * own[0] + own[1] * own[1]);
  return h;
}

ConvexPolygon ConvexPolygon::square(double half_width) {
  ConvexPolygon p;
  const double h = half_width;
  p.constraints_ = {HalfPlane{{1, 0}, h}, HalfPlane{{-1, 0}, h}, HalfPlane{{0, 1}, h},
                    HalfPlane{{0, -1}, h}};
  p.vertices_ = {Point2{-h, -h}, Point2{h, -h}, Point2{h, h}, Point2{-h, h}};
  return p;
}

void ConvexPolygon::clip(const HalfPlane& h) {
  constraints_.push_back(h);
  if (vertices_.empty()) return;
  std::vector<Point2> out;
  out.reserve(vertices_.size() + 1);
  const std::size_t n = vertices_.size();
  for (std::size_t e = 0; e < n; ++e) {
    const Point2& p = vertices_[e];
    const Point2& q = vertices_[(e + 1) % n];
    const double sp = h.slack(p);
    const double sq = h.slack(q);
    if (sp >= 0.0) out.push_back(p);
    if ((sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0)) {
      const double t = sp / (sp - sq);
      out.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
    }
  }
  // Drop repeated vertices produced by clipping through an existing vertex.
  std::vector<Point2> clean;
  for (const Point2& v : out) {
    if (clean.empty() || std::hypot(v[0] - clean.back()[0], v[1] - clean.back()[1]) > 1e-14) {
      clean.push_back(v);
    }
  }
  while (clean.size() > 1 &&
         std::hypot(clean.front()[0] - clean.back()[0], clean.front()[1] - clean.back()[1]) <=
             1e-14) {
    clean.pop_back();
  }
  vertices_ = std::move(clean);
  if (vertices_.size() < 3 || area() <= 0.0) vertices_.clear();
}

bool ConvexPolygon::contains(const Point2& x, double tol) const {
  if (empty()) return false;
  for (const HalfPlane& h : constraints_) {
    if (h.slack(x) < -tol) return false;
  }
  return true;
}

double ConvexPolygon::area() const {
  double a = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t e = 0; e < n; ++e) {
    const Point2& p = vertices_[e];
    const Point2& q = vertices_[(e + 1) % n];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * a;
}

bool ConvexPolygon::ray_range(const Point2& z, const Point2& u, double& t0, double& t1) const {
  if (empty()) return false;
  t0 = -std::numeric_limits<double>::infinity();
  t1 = std::numeric_limits<double>::infinity();
  for (const HalfPlane& h : constraints_) {
    const double nu = h.normal[0] * u[0] + h.normal[1] * u[1];
    const double s = h.slack(z);
    const double scale = std::hypot(h.normal[0], h.normal[1]);
    if (std::fabs(nu) <= 1e-15 * scale) {
      if (s < 0.0) return false;
      continue;
    }
    const double t = s / nu;
    if (nu > 0.0) {
      t1 = std::min(t1, t);
    } else {
      t0 = std::max(t0, t);
    }
  }
  return t0 <= t1;
}

ConvexPolygon voronoi_cell(const ClusterVector& c, std::size_t i) {
  if (c.dim() != 2) throw DimensionError("voronoi_cell needs a planar codebook");
  ConvexPolygon cell = ConvexPolygon::square(kPlanarWindow);
  for (std::size_t j = 0; j < c.k(); ++j) {
    if (j == i) continue;
    if (squared_distance(c[i], c[j]) == 0.0) {
      if (j < i) return ConvexPolygon{};  // the lower-index copy owns the cell
      continue;
    }
    cell.clip(bisector_halfplane(c[i], c[j]));
    if (cell.empty()) break;
  }
  return cell;
}

double BoundaryFace::measure() const {
  if (dim == 1) return 1.0;
  return std::hypot(b[0] - a[0], b[1] - a[1]);
}

std::vector<BoundaryFace> boundary_faces(const ClusterVector& c, double support_radius) {
  require_supported_dimension(c.dim());
  require_distinct(c);
  const std::size_t k = c.k();
  std::vector<BoundaryFace> faces;

  if (c.dim() == 1) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const double mid = 0.5 * (c[i][0] + c[j][0]);
        if (std::fabs(mid) > support_radius) continue;
        const double di = std::fabs(mid - c[i][0]);
        bool shared = true;
        for (std::size_t l = 0; l < k && shared; ++l) {
          if (l != i && l != j && !(std::fabs(mid - c[l][0]) > di)) shared = false;
        }
        if (!shared) continue;
        BoundaryFace f;
        f.i = i;
        f.j = j;
        f.dim = 1;
        f.a = {mid, 0.0};
        f.b = f.a;
        faces.push_back(f);
      }
    }
    return faces;
  }

  const double radius = std::isfinite(support_radius) ? support_radius : kPlanarWindow;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const Point2 p0{0.5 * (c[i][0] + c[j][0]), 0.5 * (c[i][1] + c[j][1])};
      const double dx = c[j][0] - c[i][0];
      const double dy = c[j][1] - c[i][1];
      const double len = std::hypot(dx, dy);
      const Point2 u{-dy / len, dx / len};

      double t0 = -std::numeric_limits<double>::infinity();
      double t1 = std::numeric_limits<double>::infinity();
      bool alive = true;
      for (std::size_t l = 0; l < k && alive; ++l) {
        if (l == i || l == j) continue;
        const HalfPlane h = bisector_halfplane(c[i], c[l]);
        const double nu = h.normal[0] * u[0] + h.normal[1] * u[1];
        const double s = h.slack(p0);
        if (std::fabs(nu) <= 1e-15 * std::hypot(h.normal[0], h.normal[1])) {
          if (s < 0.0) alive = false;
          continue;
        }
        if (nu > 0.0) {
          t1 = std::min(t1, s / nu);
        } else {
          t0 = std::max(t0, s / nu);
        }
      }
      if (!alive) continue;
      const double bb = p0[0] * u[0] + p0[1] * u[1];
      const double disc = bb * bb - (p0[0] * p0[0] + p0[1] * p0[1]) + radius * radius;
      if (disc <= 0.0) continue;
      const double root = std::sqrt(disc);
      t0 = std::max(t0, -bb - root);
      t1 = std::min(t1, -bb + root);
      if (!(t1 - t0 > 1e-14)) continue;
      BoundaryFace f;
      f.i = i;
      f.j = j;
      f.dim = 2;
      f.a = {p0[0] + t0 * u[0], p0[1] + t0 * u[1]};
      f.b = {p0[0] + t1 * u[0], p0[1] + t1 * u[1]};
      faces.push_back(f);
    }
  }
  return faces;
}

}  // namespace vqlab
