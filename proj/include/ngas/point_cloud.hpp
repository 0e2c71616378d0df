#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ngas {

/// An owned point in R^D.
using Point = std::vector<double>;

/// Finite set of D-dimensional points, stored row-major in one buffer.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::size_t dim);
  /// Takes ownership of `coords`; its length must be a multiple of `dim`.
  PointCloud(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ ? coords_.size() / dim_ : 0; }
  bool empty() const { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<double> operator[](std::size_t i) {
    return {coords_.data() + i * dim_, dim_};
  }

  void reserve(std::size_t n) { coords_.reserve(n * dim_); }
  void push_back(std::span<const double> p);

  const std::vector<double>& coords() const { return coords_; }
  std::vector<double>& coords() { return coords_; }

  /// True when every coordinate is finite.
  bool all_finite() const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

double norm(std::span<const double> a);

}  // namespace ngas
