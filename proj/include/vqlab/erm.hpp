#pragma once

#include <cstddef>
#include <cstdint>

#include "vqlab/distributions.hpp"
#include "vqlab/quadrature.hpp"
#include "vqlab/random.hpp"
#include "vqlab/risk.hpp"
#include "vqlab/types.hpp"

namespace vqlab {

struct ErmResult {
  ClusterVector centers;
  double risk = 0.0;             // empirical risk of `centers`
  std::size_t iterations = 0;    // center updates that changed the codebook
};

/// Global empirical risk minimizer on the line. Optimal clusters are
/// contiguous in sorted order; the segment DP uses prefix sums and the
/// monotone split-point property (divide and conquer), O(k n log n).
ErmResult kmeans_1d_exact(const PointSet& sample, std::size_t k);

/// Lloyd's alternating assign/centroid iteration. Stops once an iteration
/// lowers the empirical risk by no more than `tol`. Empty cells are
/// re-seeded at the sample point farthest from its cluster.
ErmResult lloyd(const PointSet& sample, ClusterVector init, std::size_t max_iters = 300,
                double tol = 0.0);

/// D^2-weighted seeding.
ClusterVector kmeanspp_init(const PointSet& sample, std::size_t k, Rng& rng);

/// Best of `restarts` Lloyd runs from k-means++ seeds; restart r uses seed
/// derive_seed(seed, r). Ties go to the lowest restart index.
ErmResult multistart_erm(const PointSet& sample, std::size_t k, std::size_t restarts,
                         std::uint64_t seed);

/// Exhaustive search over codebooks drawn from a grid with `grid_points`
/// values per axis spanning the sample's bounding box. Test oracle only.
ErmResult brute_force_erm(const PointSet& sample, std::size_t k, std::size_t grid_points);

struct OptimalSearchOptions {
  double gradient_tol = 1e-8;   // certification: |P Delta|_inf
  double risk_tol = 1e-9;       // members share R* within this
  double dedup_tol = 1e-6;      // aligned distance for "same member"
  std::size_t random_starts = 12;
  std::size_t perturbations = 4;
  std::size_t max_lloyd = 2000;
  std::uint64_t seed = 0x51a7e5eedULL;
  QuadratureTolerance tol{};
};

/// Population-level optimum: Lloyd iteration on the true law (centroids by
/// exact or adaptive integration) from structured starts, Newton polishing
/// with the analytic Hessian when a density exists, first-order
/// certification, and deduplication up to relabeling. Members are stored
/// with clusters in lexicographic order.
OptimalSet optimal_clusters(const SourceDistribution& dist, std::size_t k,
                            const OptimalSearchOptions& options = {});

}  // namespace vqlab
