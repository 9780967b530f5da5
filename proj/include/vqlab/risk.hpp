#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vqlab/distributions.hpp"
#include "vqlab/quadrature.hpp"
#include "vqlab/types.hpp"

namespace vqlab {

/// gamma(c, x) = min_j |x - c_j|^2.
double contrast(const ClusterVector& c, std::span<const double> x);

/// Sample mean of the contrast.
double empirical_risk(const ClusterVector& c, const PointSet& sample);

/// R(c) = P gamma(c, .). Exact piecewise integration on the line, adaptive
/// polar quadrature per cell in the plane, weighted sums for atoms.
double true_risk(const ClusterVector& c, const SourceDistribution& dist,
                 const QuadratureTolerance& tol = {});

/// Delta(c, x): block j is -2 (x - c_j) for the cell holding x, zero
/// elsewhere. Length k*d.
std::vector<double> gradient(const ClusterVector& c, std::span<const double> x);

/// P Delta(c, .), the gradient of R at c.
std::vector<double> expected_gradient(const ClusterVector& c, const SourceDistribution& dist,
                                      const QuadratureTolerance& tol = {});

double max_norm(std::span<const double> v);

/// The set of distortion-minimizing codebooks and their common risk.
struct OptimalSet {
  std::vector<ClusterVector> members;
  double risk = 0.0;
};

/// loss = R(c) - R*. R* is taken from `opt`; nothing is re-optimized.
double loss(const ClusterVector& c, const OptimalSet& opt, const SourceDistribution& dist,
            const QuadratureTolerance& tol = {});

struct Alignment {
  std::size_t member = 0;
  // permutation[i] is the member cluster matched with c_i.
  std::vector<std::size_t> permutation;
  ClusterVector aligned;  // member clusters reordered to match c
  double squared_distance = 0.0;
};

/// Member of the optimal set closest to c over members and cluster
/// relabelings: exhaustive matching for k <= 8, greedy beyond.
Alignment nearest_optimal(const ClusterVector& c, const OptimalSet& opt);

/// Var_P(gamma(c, .) - gamma(c2, .)) by integration over the overlay of the
/// two Voronoi diagrams.
double contrast_difference_variance(const ClusterVector& c, const ClusterVector& c2,
                                    const SourceDistribution& dist,
                                    const QuadratureTolerance& tol = {});

}  // namespace vqlab
