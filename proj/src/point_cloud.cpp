#include "ngas/point_cloud.hpp"

#include <cmath>

#include "ngas/error.hpp"

namespace ngas {

PointCloud::PointCloud(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InvalidInput("point cloud dimension must be >= 1");
}

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim == 0) throw InvalidInput("point cloud dimension must be >= 1");
  if (coords_.size() % dim != 0)
    throw InvalidInput("coordinate count " + std::to_string(coords_.size()) +
                       " is not a multiple of dimension " + std::to_string(dim));
}

void PointCloud::push_back(std::span<const double> p) {
  if (p.size() != dim_)
    throw InvalidInput("point of dimension " + std::to_string(p.size()) +
                       " pushed into a cloud of dimension " + std::to_string(dim_));
  coords_.insert(coords_.end(), p.begin(), p.end());
}

bool PointCloud::all_finite() const {
  for (double c : coords_)
    if (!std::isfinite(c)) return false;
  return true;
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

}  // namespace ngas
