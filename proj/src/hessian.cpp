#include "vqlab/hessian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vqlab/geometry.hpp"
#include "vqlab/integration.hpp"
#include "vqlab/risk.hpp"

namespace vqlab {

HessianMatrix::HessianMatrix(std::size_t k, std::size_t d, std::string variant)
    : k_(k), d_(d), entries_(k * d * k * d, 0.0), variant_(std::move(variant)) {}

HessianMatrix::HessianMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : k_(rows.size()), d_(1) {
  for (const auto& row : rows) {
    if (row.size() != k_) throw DimensionError("matrix rows must form a square");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
}

double HessianMatrix::max_abs_difference(const HessianMatrix& other) const {
  if (other.size() != size()) throw DimensionError("matrix sizes differ");
  double m = 0.0;
  for (std::size_t t = 0; t < entries_.size(); ++t) {
    m = std::max(m, std::fabs(entries_[t] - other.entries_[t]));
  }
  return m;
}

double HessianMatrix::max_symmetry_defect() const {
  double m = 0.0;
  for (std::size_t r = 0; r < size(); ++r) {
    for (std::size_t c = r + 1; c < size(); ++c) {
      m = std::max(m, std::fabs((*this)(r, c) - (*this)(c, r)));
    }
  }
  return m;
}

HessianMatrix analytic_hessian(const ClusterVector& c, const SourceDistribution& dist,
                               OffDiagonalSign sign, const QuadratureTolerance& tol) {
  if (!dist.has_density()) throw PreconditionError("the boundary Hessian needs a density");
  if (c.dim() != dist.dim()) throw DimensionError("codebook and distribution dimensions differ");
  require_supported_dimension(c.dim());
  require_distinct(c);
  const std::size_t k = c.k();
  const std::size_t d = c.dim();
  HessianMatrix h(k, d,
                  sign == OffDiagonalSign::kDifferentiated ? "boundary-integral" : "boundary-integral/printed-sign");

  const std::vector<CellMoments> moments = cell_moments(c, dist, tol);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t a = 0; a < d; ++a) h.block(i, i, a, a) = 2.0 * moments[i].mass;
  }

  const double off_sign = sign == OffDiagonalSign::kDifferentiated ? 1.0 : -1.0;
  for (const BoundaryFace& face : boundary_faces(c, dist.support_radius())) {
    const std::size_t i = face.i;
    const std::size_t j = face.j;
    const double r = std::sqrt(squared_distance(c[i], c[j]));
    const auto ci = c[i];
    const auto cj = c[j];
    // Layout: [ (x-ci)(x-ci)^t | (x-ci)(x-cj)^t | (x-cj)(x-cj)^t ], d x d each.
    auto integrand = [&](std::span<const double> x) {
      Values<12> v{};
      const double f = dist.density(x);
      if (f == 0.0) return v;
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
          v[a * d + b] = f * (x[a] - ci[a]) * (x[b] - ci[b]);
          v[d * d + a * d + b] = f * (x[a] - ci[a]) * (x[b] - cj[b]);
          v[2 * d * d + a * d + b] = f * (x[a] - cj[a]) * (x[b] - cj[b]);
        }
      }
      return v;
    };

    Values<12> total{};
    std::vector<double> cuts = dist.density_breaks(face);
    cuts.insert(cuts.begin(), 0.0);
    cuts.push_back(1.0);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      BoundaryFace piece = face;
      piece.a = face.point_at(cuts[s]);
      piece.b = face.point_at(cuts[s + 1]);
      if (face.dim == 2 && !(piece.measure() > 0.0)) continue;
      const Values<12> part = surface_integral<12>(piece, integrand, tol);
      for (std::size_t t = 0; t < 12; ++t) total[t] += part[t];
    }

    const double w = 2.0 / r;
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        h.block(i, i, a, b) -= w * total[a * d + b];
        h.block(j, j, a, b) -= w * total[2 * d * d + a * d + b];
        h.block(i, j, a, b) += off_sign * w * total[d * d + a * d + b];
        h.block(j, i, b, a) += off_sign * w * total[d * d + a * d + b];
      }
    }
  }
  return h;
}

HessianMatrix finite_difference_hessian(const ClusterVector& c, const SourceDistribution& dist,
                                        double step, const QuadratureTolerance& tol) {
  if (!(step > 0.0)) throw PreconditionError("finite-difference step must be positive");
  const std::size_t n = c.flat_size();
  HessianMatrix h(c.k(), c.dim(), "finite-difference");
  auto risk_at = [&](std::size_t p, double dp, std::size_t q, double dq) {
    ClusterVector x = c;
    x.coords()[p] += dp;
    x.coords()[q] += dq;
    return true_risk(x, dist, tol);
  };
  const double r0 = true_risk(c, dist, tol);
  for (std::size_t p = 0; p < n; ++p) {
    const double plus = risk_at(p, step, p, 0.0);
    const double minus = risk_at(p, -step, p, 0.0);
    h(p, p) = (plus - 2.0 * r0 + minus) / (step * step);
    for (std::size_t q = p + 1; q < n; ++q) {
      const double pp = risk_at(p, step, q, step);
      const double pm = risk_at(p, step, q, -step);
      const double mp = risk_at(p, -step, q, step);
      const double mm = risk_at(p, -step, q, -step);
      const double v = (pp - pm - mp + mm) / (4.0 * step * step);
      h(p, q) = v;
      h(q, p) = v;
    }
  }
  return h;
}

std::vector<double> symmetric_eigenvalues(const HessianMatrix& h) {
  const std::size_t n = h.size();
  std::vector<double> a = h.entries();
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::fabs(v));
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
    }
    if (std::sqrt(off) <= 1e-15 * std::max(scale, 1e-300)) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = at(r, p);
          const double arq = at(r, q);
          at(r, p) = cs * arp - sn * arq;
          at(r, q) = sn * arp + cs * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = at(p, r);
          const double aqr = at(q, r);
          at(p, r) = cs * apr - sn * aqr;
          at(q, r) = sn * apr + cs * aqr;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t p = 0; p < n; ++p) eig[p] = at(p, p);
  std::sort(eig.begin(), eig.end());
  return eig;
}

DefinitenessVerdict is_positive_definite(const HessianMatrix& h, double tol) {
  double largest = 0.0;
  double diag = 0.0;
  for (std::size_t r = 0; r < h.size(); ++r) {
    diag = std::max(diag, std::fabs(h(r, r)));
    for (std::size_t c = 0; c < h.size(); ++c) largest = std::max(largest, std::fabs(h(r, c)));
  }
  if (h.max_symmetry_defect() > 1e-8 * std::max(1.0, largest)) {
    throw PreconditionError("matrix is not symmetric");
  }
  DefinitenessVerdict v;
  v.min_eigenvalue = symmetric_eigenvalues(h).front();
  v.threshold = tol * diag;
  v.positive_definite = v.min_eigenvalue > v.threshold;
  return v;
}

std::string to_csv(const HessianMatrix& h) {
  std::string out;
  char buf[40];
  for (std::size_t r = 0; r < h.size(); ++r) {
    for (std::size_t c = 0; c < h.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", h(r, c));
      if (c > 0) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace vqlab
