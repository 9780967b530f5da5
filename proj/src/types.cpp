#include "vqlab/types.hpp"

#include <cmath>

namespace vqlab {
namespace detail {

PointArray::PointArray(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw DimensionError("point dimension must be positive");
  if (coords_.size() % dim_ != 0) {
    throw DimensionError("coordinate count is not a multiple of the dimension");
  }
}

PointArray::PointArray(std::initializer_list<std::initializer_list<double>> rows) {
  bool first = true;
  for (const auto& row : rows) {
    if (first) {
      dim_ = row.size();
      if (dim_ == 0) throw DimensionError("point dimension must be positive");
      first = false;
    } else if (row.size() != dim_) {
      throw DimensionError("rows of differing dimension");
    }
    coords_.insert(coords_.end(), row.begin(), row.end());
  }
}

void PointArray::push_back(std::span<const double> p) {
  if (!coords_.empty() && p.size() != dim_) {
    throw DimensionError("appended point has the wrong dimension");
  }
  if (coords_.empty()) dim_ = p.size();
  coords_.insert(coords_.end(), p.begin(), p.end());
}

}  // namespace detail

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double diff = a[t] - b[t];
    s += diff * diff;
  }
  return s;
}

void require_finite(const detail::PointArray& points, const char* what) {
  if (points.empty()) throw DimensionError(std::string(what) + " is empty");
  for (double v : points.coords()) {
    if (!std::isfinite(v)) throw DimensionError(std::string(what) + " has a non-finite coordinate");
  }
}

}  // namespace vqlab
