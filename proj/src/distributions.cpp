#include "vqlab/distributions.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>

#include "vqlab/integration.hpp"
#include "vqlab/random.hpp"

namespace vqlab {
namespace {

// Radius where exp(-r^2 / 2 sigma^2) underflows below 1e-300.
constexpr double kGaussianCapSigmas = 38.0;

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

void require_probabilities(const std::vector<double>& p, std::size_t count, const char* what) {
  if (p.size() != count) throw ConfigError(std::string(what) + ": wrong number of weights");
  double sum = 0.0;
  for (double w : p) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError(std::string(what) + ": weights must be positive");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-10) throw ConfigError(std::string(what) + ": weights must sum to 1");
}

std::size_t pick(const std::vector<double>& probabilities, double u) {
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < probabilities.size(); ++i) {
    cum += probabilities[i];
    if (u < cum) return i;
  }
  return probabilities.size() - 1;
}

}  // namespace

double unit_ball_volume(std::size_t d) {
  const double h = 0.5 * static_cast<double>(d);
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

double min_pairwise_distance(const PointSet& points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::min(best, std::sqrt(squared_distance(points[i], points[j])));
    }
  }
  return best;
}

Normalizers normalizers(const PointSet& means, double sigma, const QuadratureTolerance& tol) {
  if (means.dim() != 2) throw DimensionError("normalizers are defined for planar mixtures");
  Normalizers out;
  const double inv_two_var = 0.5 / (sigma * sigma);
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double mx = means[i][0];
    const double my = means[i][1];
    if (!(mx * mx + my * my < 1.0)) throw ConfigError("mixture mean outside the unit ball");
    // Radial integral in closed form: int_0^t r exp(-r^2/2s^2) dr / s^2 = 1 - exp(-t^2/2s^2).
    auto radial = [&](double theta) {
      const double ex = std::cos(theta);
      const double ey = std::sin(theta);
      const double b = mx * ex + my * ey;
      const double t = -b + std::sqrt(b * b - (mx * mx + my * my) + 1.0);
      return Values<1>{-std::expm1(-t * t * inv_two_var)};
    };
    const double integral =
        integrate_adaptive<1>(radial, 0.0, 2.0 * std::numbers::pi, 10, tol.rel_2d,
                              tol.abs_floor, 2.0 * std::numbers::pi, tol.max_depth)[0];
    out.values.push_back(std::min(1.0, integral / (2.0 * std::numbers::pi)));
  }
  out.epsilon = 1.0 - *std::min_element(out.values.begin(), out.values.end());
  return out;
}

SourceDistribution::SourceDistribution(Variant v, std::size_t dim)
    : variant_(std::move(v)), dim_(dim) {}

SourceDistribution SourceDistribution::ball_mixture(PointSet centers, double radius) {
  require_finite(centers, "ball centers");
  require_supported_dimension(centers.dim());
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("ball radius must be positive");
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (norm(centers[i]) + radius > 1.0 + 1e-12) {
      throw ConfigError("ball " + std::to_string(i) + " is not contained in the unit ball");
    }
  }
  const std::size_t d = centers.dim();
  SourceDistribution dist(BallMixture{std::move(centers), radius}, d);
  dist.build_structure();
  dist.check_total_mass();
  return dist;
}

SourceDistribution SourceDistribution::quasi_gaussian(PointSet means, std::vector<double> weights,
                                                      double sigma) {
  require_finite(means, "mixture means");
  if (means.dim() != 2) throw ConfigError("the quasi-Gaussian mixture is planar");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be positive");
  require_probabilities(weights, means.size(), "mixture");
  const double separation = min_pairwise_distance(means);
  if (means.size() >= 2) {
    if (!(separation > 0.0)) throw ConfigError("mixture means must be distinct");
    for (std::size_t i = 0; i < means.size(); ++i) {
      if (norm(means[i]) + separation / 3.0 > 1.0 + 1e-12) {
        throw ConfigError("B(m_i, min separation / 3) must lie in the unit ball");
      }
    }
  }
  Normalizers n = normalizers(means, sigma);
  SourceDistribution dist(
      QuasiGaussianMixture{std::move(means), std::move(weights), sigma, std::move(n.values)}, 2);
  dist.build_structure();
  dist.check_total_mass();
  return dist;
}

SourceDistribution SourceDistribution::tail_counterexample(double eta, double R) {
  if (!(eta > 0.0) || !(R > 0.0) || !std::isfinite(eta) || !std::isfinite(R)) {
    throw ConfigError("eta and R must be positive");
  }
  SourceDistribution dist(TailCounterexample{eta, R}, 1);
  dist.build_structure();
  dist.check_total_mass();
  return dist;
}

SourceDistribution SourceDistribution::finite_atoms(PointSet atoms,
                                                    std::vector<double> probabilities) {
  require_finite(atoms, "atoms");
  require_probabilities(probabilities, atoms.size(), "atoms");
  const std::size_t d = atoms.dim();
  return SourceDistribution(FiniteAtoms{std::move(atoms), std::move(probabilities)}, d);
}

void SourceDistribution::build_structure() {
  pieces_.clear();
  components_.clear();
  if (const auto* b = std::get_if<BallMixture>(&variant_)) {
    const std::size_t k = b->centers.size();
    const double rho = b->radius;
    const double value = 1.0 / (k * unit_ball_volume(dim_) * std::pow(rho, static_cast<double>(dim_)));
    for (std::size_t i = 0; i < k; ++i) {
      if (dim_ == 1) {
        pieces_.push_back(DensityPiece{b->centers[i][0] - rho, b->centers[i][0] + rho, false, value});
      } else {
        components_.push_back(
            RadialComponent{{b->centers[i][0], b->centers[i][1]}, rho, false, value, 0.0});
      }
    }
  } else if (const auto* q = std::get_if<QuasiGaussianMixture>(&variant_)) {
    const double var = q->sigma * q->sigma;
    for (std::size_t i = 0; i < q->means.size(); ++i) {
      const double amp = q->weights[i] / (q->normalizers[i] * 2.0 * std::numbers::pi * var);
      components_.push_back(RadialComponent{{q->means[i][0], q->means[i][1]},
                                            kGaussianCapSigmas * q->sigma, true, amp, q->sigma});
    }
  } else if (const auto* t = std::get_if<TailCounterexample>(&variant_)) {
    const double flat = 1.0 / (3.0 * t->eta);
    pieces_.push_back(DensityPiece{0.0, t->eta, false, flat});
    pieces_.push_back(DensityPiece{t->R, t->R + t->eta, false, flat});
    pieces_.push_back(
        DensityPiece{t->tail_start(), std::numeric_limits<double>::infinity(), true, t->log_q()});
  }
}

void SourceDistribution::check_total_mass() const {
  double mass = 0.0;
  if (dim_ == 1) {
    ShiftedPolynomial one;
    one.coef = {1, 0, 0, 0, 0};
    mass = integrate_polynomial(pieces_, one, -std::numeric_limits<double>::infinity(),
                                std::numeric_limits<double>::infinity());
  } else {
    mass = integrate_region<1>(*this, ConvexPolygon::square(kPlanarWindow),
                               [](std::span<const double>) { return Values<1>{1.0}; })[0];
  }
  if (std::fabs(mass - 1.0) > 1e-8) {
    throw ConfigError("distribution does not integrate to one (mass " + std::to_string(mass) + ")");
  }
}

std::string SourceDistribution::kind() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BallMixture>) return "ball_mixture";
        if constexpr (std::is_same_v<T, QuasiGaussianMixture>) return "quasi_gaussian_mixture";
        if constexpr (std::is_same_v<T, TailCounterexample>) return "tail_counterexample";
        return "finite_atoms";
      },
      variant_);
}

double SourceDistribution::support_radius() const {
  if (std::holds_alternative<TailCounterexample>(variant_)) {
    return std::numeric_limits<double>::infinity();
  }
  if (const auto* a = std::get_if<FiniteAtoms>(&variant_)) {
    double r = 0.0;
    for (std::size_t i = 0; i < a->atoms.size(); ++i) r = std::max(r, norm(a->atoms[i]));
    return r;
  }
  return 1.0;
}

double SourceDistribution::density(std::span<const double> x) const {
  if (x.size() != dim_) throw DimensionError("point and distribution dimensions differ");
  for (double v : x) {
    if (!std::isfinite(v)) throw DimensionError("density evaluated at a non-finite point");
  }
  if (const auto* b = std::get_if<BallMixture>(&variant_)) {
    const double rho2 = b->radius * b->radius;
    const double value =
        1.0 / (b->centers.size() * unit_ball_volume(dim_) * std::pow(b->radius, static_cast<double>(dim_)));
    double f = 0.0;
    for (std::size_t i = 0; i < b->centers.size(); ++i) {
      if (squared_distance(b->centers[i], x) <= rho2) f += value;
    }
    return f;
  }
  if (const auto* q = std::get_if<QuasiGaussianMixture>(&variant_)) {
    if (x[0] * x[0] + x[1] * x[1] > 1.0) return 0.0;
    double f = 0.0;
    const double inv_two_var = 0.5 / (q->sigma * q->sigma);
    for (const RadialComponent& comp : components_) {
      const double dx = x[0] - comp.center[0];
      const double dy = x[1] - comp.center[1];
      f += comp.amplitude * std::exp(-(dx * dx + dy * dy) * inv_two_var);
    }
    return f;
  }
  if (std::holds_alternative<TailCounterexample>(variant_)) {
    double f = 0.0;
    for (const DensityPiece& p : pieces_) f += p.at(x[0]);
    return f;
  }
  throw PreconditionError("an atomic distribution has no density");
}

PointSet SourceDistribution::sample(std::uint64_t seed, std::size_t n) const {
  if (n == 0) throw PreconditionError("sample size must be at least 1");
  Rng rng(seed);
  std::vector<double> coords;
  coords.reserve(n * dim_);

  if (const auto* b = std::get_if<BallMixture>(&variant_)) {
    const std::size_t k = b->centers.size();
    for (std::size_t s = 0; s < n; ++s) {
      const auto z = b->centers[rng.index(k)];
      if (dim_ == 1) {
        coords.push_back(z[0] + b->radius * (2.0 * rng.uniform() - 1.0));
      } else {
        const double r = b->radius * std::sqrt(rng.uniform());
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        coords.push_back(z[0] + r * std::cos(theta));
        coords.push_back(z[1] + r * std::sin(theta));
      }
    }
  } else if (const auto* q = std::get_if<QuasiGaussianMixture>(&variant_)) {
    for (std::size_t s = 0; s < n; ++s) {
      const auto m = q->means[pick(q->weights, rng.uniform())];
      for (;;) {
        const double x = m[0] + q->sigma * rng.normal();
        const double y = m[1] + q->sigma * rng.normal();
        if (x * x + y * y <= 1.0) {
          coords.push_back(x);
          coords.push_back(y);
          break;
        }
      }
    }
  } else if (const auto* t = std::get_if<TailCounterexample>(&variant_)) {
    for (std::size_t s = 0; s < n; ++s) {
      switch (rng.index(3)) {
        case 0:
          coords.push_back(t->eta * rng.uniform());
          break;
        case 1:
          coords.push_back(t->R + t->eta * rng.uniform());
          break;
        default:
          coords.push_back(t->tail_start() + rng.exponential());
          break;
      }
    }
  } else {
    const auto& a = std::get<FiniteAtoms>(variant_);
    for (std::size_t s = 0; s < n; ++s) {
      const auto x = a.atoms[pick(a.probabilities, rng.uniform())];
      coords.insert(coords.end(), x.begin(), x.end());
    }
  }
  return PointSet(dim_, std::move(coords));
}

double SourceDistribution::second_moment() const {
  if (const auto* a = std::get_if<FiniteAtoms>(&variant_)) {
    double m = 0.0;
    for (std::size_t i = 0; i < a->atoms.size(); ++i) {
      const auto x = a->atoms[i];
      m += a->probabilities[i] * std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
    }
    return m;
  }
  if (dim_ == 1) {
    ShiftedPolynomial sq;
    sq.coef = {0, 0, 1, 0, 0};
    return integrate_polynomial(pieces_, sq, -std::numeric_limits<double>::infinity(),
                                std::numeric_limits<double>::infinity());
  }
  return integrate_region<1>(*this, ConvexPolygon::square(kPlanarWindow),
                             [](std::span<const double> x) {
                               return Values<1>{x[0] * x[0] + x[1] * x[1]};
                             })[0];
}

std::vector<double> SourceDistribution::density_breaks(const BoundaryFace& face) const {
  std::vector<double> out;
  const auto* b = std::get_if<BallMixture>(&variant_);
  if (b == nullptr || face.dim != 2) return out;
  const double dx = face.b[0] - face.a[0];
  const double dy = face.b[1] - face.a[1];
  const double aa = dx * dx + dy * dy;
  if (aa == 0.0) return out;
  for (std::size_t i = 0; i < b->centers.size(); ++i) {
    const double fx = face.a[0] - b->centers[i][0];
    const double fy = face.a[1] - b->centers[i][1];
    const double bb = 2.0 * (fx * dx + fy * dy);
    const double cc = fx * fx + fy * fy - b->radius * b->radius;
    const double disc = bb * bb - 4.0 * aa * cc;
    if (disc <= 0.0) continue;
    const double root = std::sqrt(disc);
    for (double s : {(-bb - root) / (2.0 * aa), (-bb + root) / (2.0 * aa)}) {
      if (s > 0.0 && s < 1.0) out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

PointSet SourceDistribution::component_centers() const {
  if (const auto* b = std::get_if<BallMixture>(&variant_)) return b->centers;
  if (const auto* q = std::get_if<QuasiGaussianMixture>(&variant_)) return q->means;
  if (const auto* t = std::get_if<TailCounterexample>(&variant_)) {
    return PointSet(1, {0.5 * t->eta, t->R + 0.5 * t->eta, t->tail_start() + 1.0});
  }
  return std::get<FiniteAtoms>(variant_).atoms;
}

}  // namespace vqlab
