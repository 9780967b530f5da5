#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vqlab/types.hpp"

namespace vqlab {

/// Tolerances used by every numerical integral in the library.
///
/// `rel_1d` governs line integrals (boundary faces, angular sweeps) and
/// `rel_2d` the planar cell integrals. Both are relative to the magnitude of
/// the integral; `abs_floor` keeps integrals that vanish from refining
/// forever.
struct QuadratureTolerance {
  double rel_1d = 1e-8;
  double rel_2d = 1e-10;
  double abs_floor = 1e-15;
  int max_depth = 40;
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule with `order` points, 1 <= order <= 64. Tables are
// built once on first use.
const GaussRule& gauss_legendre(int order);

template <std::size_t N>
using Values = std::array<double, N>;

template <std::size_t N>
inline double max_abs(const Values<N>& v) {
  double m = 0.0;
  for (double x : v) m = std::fmax(m, std::fabs(x));
  return m;
}

template <std::size_t N>
inline bool all_finite(const Values<N>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

template <std::size_t N>
inline void add_scaled(Values<N>& acc, double w, const Values<N>& v) {
  for (std::size_t t = 0; t < N; ++t) acc[t] += w * v[t];
}

/// Composite rule: `panels` equal panels on [a, b], each with `rule`.
template <std::size_t N, class F>
Values<N> integrate_panels(F&& f, double a, double b, const GaussRule& rule, int panels) {
  Values<N> total{};
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    Values<N> part{};
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const Values<N> v = f(mid + 0.5 * h * rule.nodes[q]);
      if (!all_finite(v)) throw QuadratureError("non-finite integrand value");
      add_scaled(part, rule.weights[q], v);
    }
    add_scaled(total, 0.5 * h, part);
  }
  return total;
}

/// Doubles the number of panels until two successive composite estimates
/// agree within `rel` (relative) or `abs_floor`.
template <std::size_t N, class F>
Values<N> integrate_refined(F&& f, double a, double b, int order, double rel, double abs_floor,
                            int max_doublings = 14) {
  const GaussRule& rule = gauss_legendre(order);
  int panels = 1;
  Values<N> coarse = integrate_panels<N>(f, a, b, rule, panels);
  for (int it = 0; it < max_doublings; ++it) {
    panels *= 2;
    const Values<N> fine = integrate_panels<N>(f, a, b, rule, panels);
    Values<N> diff;
    for (std::size_t t = 0; t < N; ++t) diff[t] = fine[t] - coarse[t];
    if (max_abs(diff) <= std::fmax(rel * max_abs(fine), abs_floor)) return fine;
    coarse = fine;
  }
  throw QuadratureError("panel refinement did not converge");
}

namespace detail {

template <std::size_t N, class F>
Values<N> adaptive_step(F& f, double a, double b, const Values<N>& whole, const GaussRule& rule,
                        double tol, int depth, int max_depth) {
  const double mid = 0.5 * (a + b);
  const Values<N> left = integrate_panels<N>(f, a, mid, rule, 1);
  const Values<N> right = integrate_panels<N>(f, mid, b, rule, 1);
  Values<N> both;
  Values<N> diff;
  for (std::size_t t = 0; t < N; ++t) {
    both[t] = left[t] + right[t];
    diff[t] = both[t] - whole[t];
  }
  if (max_abs(diff) <= tol) return both;
  if (depth >= max_depth) throw QuadratureError("adaptive quadrature exceeded its depth limit");
  const Values<N> l = adaptive_step<N>(f, a, mid, left, rule, 0.5 * tol, depth + 1, max_depth);
  const Values<N> r = adaptive_step<N>(f, mid, b, right, rule, 0.5 * tol, depth + 1, max_depth);
  Values<N> out;
  for (std::size_t t = 0; t < N; ++t) out[t] = l[t] + r[t];
  return out;
}

}  // namespace detail

/// Locally adaptive bisection. `scale` is a magnitude estimate of the
/// integral used to turn `rel` into an absolute target.
template <std::size_t N, class F>
Values<N> integrate_adaptive(F&& f, double a, double b, int order, double rel, double abs_floor,
                             double scale = 0.0, int max_depth = 40) {
  if (!(b > a)) return Values<N>{};
  const GaussRule& rule = gauss_legendre(order);
  const Values<N> whole = integrate_panels<N>(f, a, b, rule, 1);
  const double target = std::fmax(rel * std::fmax(scale, max_abs(whole)), abs_floor);
  return detail::adaptive_step<N>(f, a, b, whole, rule, target, 0, max_depth);
}

}  // namespace vqlab
