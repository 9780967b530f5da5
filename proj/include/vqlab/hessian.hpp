#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "vqlab/distributions.hpp"
#include "vqlab/quadrature.hpp"
#include "vqlab/types.hpp"

namespace vqlab {

/// Symmetric kd x kd matrix of second derivatives of c -> P gamma(c, .),
/// arranged as a k x k grid of d x d blocks.
class HessianMatrix {
 public:
  HessianMatrix() = default;
  HessianMatrix(std::size_t k, std::size_t d, std::string variant = {});
  // Plain square matrix (k = rows, d = 1); used for hand-written inputs.
  HessianMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t k() const { return k_; }
  std::size_t d() const { return d_; }
  std::size_t size() const { return k_ * d_; }

  double& operator()(std::size_t r, std::size_t c) { return entries_[r * size() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return entries_[r * size() + c]; }
  double& block(std::size_t i, std::size_t j, std::size_t a, std::size_t b) {
    return (*this)(i * d_ + a, j * d_ + b);
  }
  double block(std::size_t i, std::size_t j, std::size_t a, std::size_t b) const {
    return (*this)(i * d_ + a, j * d_ + b);
  }

  const std::vector<double>& entries() const { return entries_; }
  const std::string& variant() const { return variant_; }

  double max_abs_difference(const HessianMatrix& other) const;
  double max_symmetry_defect() const;

 private:
  std::size_t k_ = 0;
  std::size_t d_ = 1;
  std::vector<double> entries_;
  std::string variant_;
};

/// Sign applied to the off-diagonal boundary blocks.
///  kDifferentiated: +2 r_ij^{-1} sigma[f (x - c_i)(x - c_j)^t], the sign
///    obtained by differentiating the risk (agrees with finite differences).
///  kAsPrinted: the opposite sign, kept for comparison.
enum class OffDiagonalSign { kDifferentiated, kAsPrinted };

/// Boundary-integral Hessian:
///   H_ii = 2 P(V_i) I - 2 sum_{l != i} r_il^{-1} sigma[f (x - c_i)(x - c_i)^t 1_{face il}]
///   H_ij = +/- 2 r_ij^{-1} sigma[f (x - c_i)(x - c_j)^t 1_{face ij}]
/// Faces are split where the density has jumps so every piece is smooth.
HessianMatrix analytic_hessian(const ClusterVector& c, const SourceDistribution& dist,
                               OffDiagonalSign sign = OffDiagonalSign::kDifferentiated,
                               const QuadratureTolerance& tol = {});

/// Central second differences of true_risk, symmetrized.
HessianMatrix finite_difference_hessian(const ClusterVector& c, const SourceDistribution& dist,
                                        double step = 1e-3, const QuadratureTolerance& tol = {});

/// Eigenvalues (ascending) by cyclic Jacobi rotations.
std::vector<double> symmetric_eigenvalues(const HessianMatrix& h);

struct DefinitenessVerdict {
  bool positive_definite = false;
  double min_eigenvalue = 0.0;
  double threshold = 0.0;  // tol * largest |diagonal entry|
};

/// Throws PreconditionError when the matrix is not symmetric within 1e-8
/// (relative to its largest entry).
DefinitenessVerdict is_positive_definite(const HessianMatrix& h, double tol = 1e-6);

/// Rows of 17-significant-digit values separated by commas.
std::string to_csv(const HessianMatrix& h);

}  // namespace vqlab
