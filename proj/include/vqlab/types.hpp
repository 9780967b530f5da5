#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vqlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Duplicate clusters, unsupported dimension, degenerate geometry.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class CertificationError : public Error {
 public:
  using Error::Error;
};

// An operation was asked for something its inputs cannot provide
// (density of an atomic law, an oversized brute-force instance, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

// Row-major storage of m points in R^d.
class PointArray {
 public:
  PointArray() = default;
  PointArray(std::size_t dim, std::vector<double> coords);
  PointArray(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<double> operator[](std::size_t i) {
    return {coords_.data() + i * dim_, dim_};
  }

  const std::vector<double>& coords() const { return coords_; }
  std::vector<double>& coords() { return coords_; }

  void push_back(std::span<const double> p);

  friend bool operator==(const PointArray&, const PointArray&) = default;

 protected:
  std::size_t dim_ = 1;
  std::vector<double> coords_;
};

}  // namespace detail

/// A sample of observations x_1..x_n in R^d.
class PointSet : public detail::PointArray {
 public:
  using PointArray::PointArray;
};

/// The codebook c = (c_1, ..., c_k); each c_i is a point of R^d.
class ClusterVector : public detail::PointArray {
 public:
  using PointArray::PointArray;

  std::size_t k() const { return size(); }
  // Flattened length k*d, the coordinate space of Hessians and gradients.
  std::size_t flat_size() const { return coords_.size(); }
};

double squared_distance(std::span<const double> a, std::span<const double> b);

// Throws DimensionError unless every coordinate is finite and the set is
// nonempty.
void require_finite(const detail::PointArray& points, const char* what);

}  // namespace vqlab
