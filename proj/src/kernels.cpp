#include "ngas/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ngas/parallel.hpp"

namespace ngas {

namespace {

std::uint32_t nearest_unit(const PointCloud& units, std::span<const double> q) {
  std::uint32_t best = 0;
  double best_d = squared_distance(q, units[0]);
  for (std::uint32_t i = 1; i < units.size(); ++i) {
    const double d = squared_distance(q, units[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double nearest_sq(const PointCloud& units, std::span<const double> q) {
  return squared_distance(q, units[nearest_unit(units, q)]);
}

// sum_i h(k_i(v)) |v - w_i|^2 for one signal; scratch avoids reallocations.
double energy_term(const PointCloud& units, std::span<const double> v, double lambda,
                   std::vector<double>& d) {
  if (lambda == 0.0) return nearest_sq(units, v);
  const std::size_t k = units.size();
  d.resize(k);
  for (std::size_t i = 0; i < k; ++i) d[i] = squared_distance(v, units[i]);
  // Rank order only depends on the sorted distances themselves, and equal
  // distances contribute equally regardless of their tie-break.
  std::sort(d.begin(), d.end());
  double s = 0.0;
  for (std::size_t r = 0; r < k; ++r) s += std::exp(-static_cast<double>(r) / lambda) * d[r];
  return s;
}

double ordered_sum(const std::vector<double>& terms) {
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

double kdistance_of(const DensityIndex& index, const PointCloud& queries, std::size_t i,
                    bool exclude_self) {
  return exclude_self ? index.kdistance_excluding(queries[i], i) : index.kdistance(queries[i]);
}

}  // namespace

namespace serial {

std::vector<std::uint32_t> nearest_units(const PointCloud& units, const PointCloud& queries) {
  std::vector<std::uint32_t> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) out[i] = nearest_unit(units, queries[i]);
  return out;
}

double energy_sum(const PointCloud& units, const PointCloud& cloud, double lambda) {
  std::vector<double> scratch;
  double s = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) s += energy_term(units, cloud[i], lambda, scratch);
  return s;
}

double distortion_sum(const PointCloud& units, const PointCloud& cloud) {
  double s = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) s += nearest_sq(units, cloud[i]);
  return s;
}

double directed_distance(const PointCloud& from, const KdTree& to) {
  double worst = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i)
    worst = std::max(worst, to.nearest(from[i]).sq_dist);
  return std::sqrt(worst);
}

std::vector<double> kdistances(const DensityIndex& index, const PointCloud& queries,
                               bool exclude_self) {
  std::vector<double> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i)
    out[i] = kdistance_of(index, queries, i, exclude_self);
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<std::uint32_t> nearest_units(const PointCloud& units, const PointCloud& queries) {
  const auto n = static_cast<std::int64_t>(queries.size());
  std::vector<std::uint32_t> out(queries.size());
  NGAS_OMP(parallel for schedule(static))
  for (std::int64_t i = 0; i < n; ++i) out[i] = nearest_unit(units, queries[i]);
  return out;
}

double energy_sum(const PointCloud& units, const PointCloud& cloud, double lambda) {
  const auto n = static_cast<std::int64_t>(cloud.size());
  std::vector<double> terms(cloud.size());
  NGAS_OMP(parallel)
  {
    std::vector<double> scratch;
    NGAS_OMP(for schedule(static))
    for (std::int64_t i = 0; i < n; ++i) terms[i] = energy_term(units, cloud[i], lambda, scratch);
  }
  return ordered_sum(terms);
}

double distortion_sum(const PointCloud& units, const PointCloud& cloud) {
  const auto n = static_cast<std::int64_t>(cloud.size());
  std::vector<double> terms(cloud.size());
  NGAS_OMP(parallel for schedule(static))
  for (std::int64_t i = 0; i < n; ++i) terms[i] = nearest_sq(units, cloud[i]);
  return ordered_sum(terms);
}

double directed_distance(const PointCloud& from, const KdTree& to) {
  const auto n = static_cast<std::int64_t>(from.size());
  double worst = 0.0;
  NGAS_OMP(parallel for schedule(static) reduction(max : worst))
  for (std::int64_t i = 0; i < n; ++i) worst = std::max(worst, to.nearest(from[i]).sq_dist);
  return std::sqrt(worst);
}

std::vector<double> kdistances(const DensityIndex& index, const PointCloud& queries,
                               bool exclude_self) {
  const auto n = static_cast<std::int64_t>(queries.size());
  std::vector<double> out(queries.size());
  NGAS_OMP(parallel for schedule(dynamic, 16))
  for (std::int64_t i = 0; i < n; ++i) out[i] = kdistance_of(index, queries, i, exclude_self);
  return out;
}

}  // namespace parallel

}  // namespace ngas
