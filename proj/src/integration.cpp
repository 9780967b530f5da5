#include "vqlab/integration.hpp"

#include <limits>

namespace vqlab {

double integrate_polynomial(const std::vector<DensityPiece>& pieces, const ShiftedPolynomial& p,
                            double lo, double hi) {
  constexpr std::size_t kTerms = 5;
  double total = 0.0;
  for (const DensityPiece& piece : pieces) {
    const double a = std::max(lo, piece.lo);
    const double b = std::min(hi, piece.hi);
    if (!(b > a)) continue;
    if (!piece.exponential) {
      // Antiderivative sum_j c_j u^{j+1} / (j+1) in u = x - shift.
      auto F = [&](double x) {
        const double u = x - p.shift;
        double acc = 0.0;
        for (std::size_t j = kTerms; j-- > 0;) acc = acc * u + p.coef[j] / (j + 1.0);
        return acc * u;
      };
      total += piece.value * (F(b) - F(a));
    } else {
      // d/dx [-exp(L - x) sum_m p^{(m)}(x)] = p(x) exp(L - x).
      auto G = [&](double x) {
        if (std::isinf(x)) return 0.0;
        const double u = x - p.shift;
        std::array<double, kTerms> d = p.coef;
        double sum = 0.0;
        for (std::size_t m = 0; m < kTerms; ++m) {
          double val = 0.0;
          for (std::size_t j = kTerms; j-- > 0;) val = val * u + d[j];
          sum += val;
          for (std::size_t j = 0; j + 1 < kTerms; ++j) d[j] = (j + 1.0) * d[j + 1];
          d[kTerms - 1] = 0.0;
        }
        return std::exp(piece.value - x) * sum;
      };
      total += G(a) - G(b);
    }
  }
  return total;
}

namespace detail {

namespace {

void push_angle(const Point2& z, const Point2& x, std::vector<double>& angles) {
  const double dx = x[0] - z[0];
  const double dy = x[1] - z[1];
  if (std::hypot(dx, dy) > 1e-15) angles.push_back(std::atan2(dy, dx));
}

}  // namespace

void circle_segment_angles(const Point2& z, const Point2& center, double radius, const Point2& p,
                           const Point2& q, std::vector<double>& angles) {
  const double dx = q[0] - p[0];
  const double dy = q[1] - p[1];
  const double fx = p[0] - center[0];
  const double fy = p[1] - center[1];
  const double a = dx * dx + dy * dy;
  if (a == 0.0) return;
  const double b = 2.0 * (fx * dx + fy * dy);
  const double c = fx * fx + fy * fy - radius * radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return;
  const double root = std::sqrt(disc);
  for (double s : {(-b - root) / (2.0 * a), (-b + root) / (2.0 * a)}) {
    if (s >= 0.0 && s <= 1.0) push_angle(z, {p[0] + s * dx, p[1] + s * dy}, angles);
  }
}

void circle_circle_angles(const Point2& z, const Point2& c1, double r1, const Point2& c2,
                          double r2, std::vector<double>& angles) {
  const double dx = c2[0] - c1[0];
  const double dy = c2[1] - c1[1];
  const double d = std::hypot(dx, dy);
  if (d == 0.0 || d > r1 + r2 || d < std::fabs(r1 - r2)) return;
  const double a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  const double h2 = r1 * r1 - a * a;
  const double h = h2 > 0.0 ? std::sqrt(h2) : 0.0;
  const Point2 m{c1[0] + a * dx / d, c1[1] + a * dy / d};
  push_angle(z, {m[0] - h * dy / d, m[1] + h * dx / d}, angles);
  push_angle(z, {m[0] + h * dy / d, m[1] - h * dx / d}, angles);
}

double distance_to_polygon(const ConvexPolygon& poly, const Point2& z) {
  if (poly.contains(z)) return 0.0;
  const auto& v = poly.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < v.size(); ++e) {
    const Point2& p = v[e];
    const Point2& q = v[(e + 1) % v.size()];
    const double dx = q[0] - p[0];
    const double dy = q[1] - p[1];
    const double len2 = dx * dx + dy * dy;
    double s = len2 > 0.0 ? ((z[0] - p[0]) * dx + (z[1] - p[1]) * dy) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    best = std::min(best, std::hypot(p[0] + s * dx - z[0], p[1] + s * dy - z[1]));
  }
  return best;
}

std::vector<double> break_angles(const ConvexPolygon& region, const RadialComponent& comp) {
  const Point2& z = comp.center;
  const Point2 origin{0.0, 0.0};
  std::vector<double> angles;
  const auto& v = region.vertices();
  for (std::size_t e = 0; e < v.size(); ++e) {
    const Point2& p = v[e];
    const Point2& q = v[(e + 1) % v.size()];
    push_angle(z, p, angles);
    circle_segment_angles(z, z, comp.cap, p, q, angles);
    if (comp.gaussian) circle_segment_angles(z, origin, 1.0, p, q, angles);
  }
  if (comp.gaussian) circle_circle_angles(z, z, comp.cap, origin, 1.0, angles);
  std::sort(angles.begin(), angles.end());
  std::vector<double> unique;
  for (double a : angles) {
    if (unique.empty() || a - unique.back() > 1e-14) unique.push_back(a);
  }
  if (unique.size() > 1 && unique.front() + 2.0 * std::numbers::pi - unique.back() <= 1e-14) {
    unique.pop_back();
  }
  return unique;
}

}  // namespace detail

std::vector<CellMoments> cell_moments(const ClusterVector& c, const SourceDistribution& dist,
                                      const QuadratureTolerance& tol) {
  if (c.dim() != dist.dim()) throw DimensionError("codebook and distribution dimensions differ");
  require_finite(c, "codebook");
  const std::size_t k = c.k();
  std::vector<CellMoments> out(k);

  if (const auto* atoms = std::get_if<FiniteAtoms>(&dist.variant())) {
    for (std::size_t a = 0; a < atoms->atoms.size(); ++a) {
      const auto x = atoms->atoms[a];
      const double p = atoms->probabilities[a];
      const std::size_t owner = assign(c, x);
      CellMoments& m = out[owner];
      const auto ci = c[owner];
      m.mass += p;
      for (std::size_t t = 0; t < c.dim(); ++t) m.first[t] += p * (x[t] - ci[t]);
      m.second += p * squared_distance(x, ci);
    }
    return out;
  }

  if (c.dim() == 1) {
    const std::vector<Interval> cells = voronoi_intervals(c);
    for (std::size_t i = 0; i < k; ++i) {
      if (cells[i].empty()) continue;
      ShiftedPolynomial p;
      p.shift = c[i][0];
      p.coef = {1, 0, 0, 0, 0};
      out[i].mass = integrate_polynomial(dist.pieces(), p, cells[i].lo, cells[i].hi);
      p.coef = {0, 1, 0, 0, 0};
      out[i].first[0] = integrate_polynomial(dist.pieces(), p, cells[i].lo, cells[i].hi);
      p.coef = {0, 0, 1, 0, 0};
      out[i].second = integrate_polynomial(dist.pieces(), p, cells[i].lo, cells[i].hi);
    }
    return out;
  }

  require_supported_dimension(c.dim());
  for (std::size_t i = 0; i < k; ++i) {
    const ConvexPolygon cell = voronoi_cell(c, i);
    if (cell.empty()) continue;
    const double cx = c[i][0];
    const double cy = c[i][1];
    const Values<4> v = integrate_region<4>(
        dist, cell,
        [cx, cy](std::span<const double> x) {
          const double dx = x[0] - cx;
          const double dy = x[1] - cy;
          return Values<4>{1.0, dx, dy, dx * dx + dy * dy};
        },
        tol);
    out[i] = CellMoments{v[0], {v[1], v[2]}, v[3]};
  }
  return out;
}

double cell_mass(const ClusterVector& c, std::size_t i, const SourceDistribution& dist) {
  if (i >= c.k()) throw DimensionError("cell index out of range");
  return cell_moments(c, dist)[i].mass;
}

}  // namespace vqlab
