/*
 * Batch kernels over whole clouds. Each kernel exists twice: a plain serial
 * loop kept as the reference, and an OpenMP version. Reductions in the
 * parallel versions write per-item results first and combine them in index
 * order, so both versions return bit-identical values.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ngas/point_cloud.hpp"
#include "ngas/spatial.hpp"

namespace ngas {

namespace serial {

/// Index of the nearest unit for every query (ties go to the lower index).
std::vector<std::uint32_t> nearest_units(const PointCloud& units, const PointCloud& queries);

/// sum over cloud points v of sum_i h_lambda(k_i(v)) |v - w_i|^2.
double energy_sum(const PointCloud& units, const PointCloud& cloud, double lambda);

/// sum over cloud points of the squared distance to the nearest unit.
double distortion_sum(const PointCloud& units, const PointCloud& cloud);

/// max over `from` of the distance to the nearest point indexed by `to`.
double directed_distance(const PointCloud& from, const KdTree& to);

/// kdistance (or the self-excluding variant when exclude_self) for every query.
/// With exclude_self, query i is assumed to be cloud point i.
std::vector<double> kdistances(const DensityIndex& index, const PointCloud& queries,
                               bool exclude_self);

}  // namespace serial

namespace parallel {

std::vector<std::uint32_t> nearest_units(const PointCloud& units, const PointCloud& queries);
double energy_sum(const PointCloud& units, const PointCloud& cloud, double lambda);
double distortion_sum(const PointCloud& units, const PointCloud& cloud);
double directed_distance(const PointCloud& from, const KdTree& to);
std::vector<double> kdistances(const DensityIndex& index, const PointCloud& queries,
                               bool exclude_self);

}  // namespace parallel

}  // namespace ngas
