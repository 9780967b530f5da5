#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "vqlab/distributions.hpp"
#include "vqlab/risk.hpp"
#include "vqlab/types.hpp"

namespace vqlab {

/// Evaluated sides of a sufficient condition of the form lhs <= rhs.
struct ConditionReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  double tolerance = 0.0;
  std::map<std::string, double> quantities;
  std::vector<std::string> notes;
};

/// Gamma(d/2) B / (2^{d+5} pi^{d/2}) * inf P(V_i*).
double boundary_density_threshold(std::size_t d, double min_separation, double min_cell_mass);

/// Sup of the density over the union of optimal Voronoi boundaries against
/// boundary_density_threshold. Passing implies the Hessian is positive
/// definite at every optimal codebook.
ConditionReport check_boundary_density_bound(const SourceDistribution& dist, const OptimalSet& opt);

/// Separation of a ball mixture: R/2 > 3 rho and
/// (R/2 - 3 rho)^2 >= 2 rho^2 d / (d + 2), where R is the smallest distance
/// between ball centers. Passing makes the centers the optimal codebook.
ConditionReport check_ball_separation(double rho, double R, std::size_t d);
ConditionReport check_ball_separation(const SourceDistribution& ball_mixture);

struct PolarizationTerms {
  double proximity = 0.0;   // 288 k s^2 / ((1-e) B~^2 (1 - exp(-B~^2 / 288 s^2)))
  double boundary = 0.0;    // 96 k / ((1-e) s^2 B~ (exp(B~ / 72 s^2) - 1))
};

PolarizationTerms polarization_terms(std::size_t k, double sigma, double epsilon,
                                     double mean_separation);

/// p_min / p_max against the larger of the two polarization terms, with
/// epsilon taken from the computed normalizers.
ConditionReport check_mixture_polarization(const SourceDistribution& quasi_gaussian);

/// Every mixture mean has an optimal cluster within B~/6, and
/// 2B~/3 <= B <= 4B~/3. When p_min/p_max is below the proximity term the
/// report is informational (quantity "hypothesis_holds" = 0).
ConditionReport verify_mean_proximity(const SourceDistribution& quasi_gaussian,
                                      const OptimalSet& opt);

/// Empirical maxima over random probes; these are lower bounds on the
/// margin constants A1 (distance vs. loss) and A2 (variance vs. distance).
struct MarginEstimate {
  double a1_lower_bound = 0.0;
  double a2_lower_bound = 0.0;
  std::size_t probes = 0;
  std::size_t skipped_a1 = 0;  // probes with loss < 1e-9
  std::size_t skipped_a2 = 0;  // probe/member pairs at distance < 1e-6
  std::uint64_t seed = 0;
};

MarginEstimate estimate_margin_constants(const SourceDistribution& dist, const OptimalSet& opt,
                                         std::size_t n_probe, std::uint64_t seed);

struct DistanceLossRatio {
  double loss = 0.0;
  double squared_distance = 0.0;
  double ratio = 0.0;
};

/// |c - c*(c)|^2 / loss(c) at one codebook (which may lie outside the unit
/// ball).
DistanceLossRatio distance_loss_ratio(const ClusterVector& c, const SourceDistribution& dist,
                                      const OptimalSet& opt);

}  // namespace vqlab
