#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ngas/point_cloud.hpp"

namespace ngas {

struct Neighbor {
  std::uint32_t index = 0;
  double sq_dist = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Exact k-nearest-neighbor index (axis-aligned median split kd-tree).
///
/// Results are sorted by (squared distance, point index), which makes them
/// identical to an exhaustive scan under the same ordering.
class KdTree {
 public:
  explicit KdTree(PointCloud cloud, std::size_t leaf_size = 16);

  const PointCloud& cloud() const { return cloud_; }
  std::size_t size() const { return cloud_.size(); }
  std::size_t dim() const { return cloud_.dim(); }

  /// The m nearest points to q (m is clamped to size()).
  std::vector<Neighbor> knn(std::span<const double> q, std::size_t m) const;
  void knn(std::span<const double> q, std::size_t m, std::vector<Neighbor>& out) const;

  Neighbor nearest(std::span<const double> q) const;

 private:
  struct Node {
    std::uint32_t begin = 0, end = 0;  // range in perm_ (leaves only)
    std::int32_t left = -1, right = -1;
    std::uint32_t split_dim = 0;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, std::span<const double> q, std::size_t m,
              std::vector<Neighbor>& heap) const;

  PointCloud cloud_;
  std::size_t leaf_size_;
  std::vector<std::uint32_t> perm_;
  std::vector<Node> nodes_;
};

/// Exhaustive-scan reference for KdTree::knn, same ordering.
std::vector<Neighbor> brute_force_knn(const PointCloud& cloud, std::span<const double> q,
                                      std::size_t m);

/// Point cloud plus exact k-NN index and the neighbor count m0 used by the
/// weighted k-distance and the density estimator built on it.
class DensityIndex {
 public:
  /// Throws InvalidInput unless 1 <= m0 <= N.
  DensityIndex(PointCloud cloud, std::size_t m0);

  std::size_t m0() const { return m0_; }
  std::size_t size() const { return tree_.size(); }
  std::size_t dim() const { return tree_.dim(); }
  const PointCloud& cloud() const { return tree_.cloud(); }
  const KdTree& tree() const { return tree_; }

  /// The m0 nearest cloud points to x, sorted by distance.
  std::vector<Neighbor> neighbors(std::span<const double> x) const;

  /// sqrt(mean squared distance to the m0 nearest cloud points).
  double kdistance(std::span<const double> x) const;

  /// Same, computed over the cloud with point `self` removed. Requires m0 < N.
  double kdistance_excluding(std::span<const double> x, std::size_t self) const;

  /// Density estimate at x from the k-distance, using N = size().
  /// Throws SingularEstimate on zero k-distance.
  double estimate(std::span<const double> x) const;

  /// Leave-one-out estimate over the cloud without `self` (N = size() - 1).
  double estimate_excluding(std::span<const double> x, std::size_t self) const;

  /// The estimator as a function of an already computed k-distance and the
  /// cloud size it refers to.
  double estimate_from_kdistance(double kdist, std::size_t n) const;

 private:
  KdTree tree_;
  std::size_t m0_;
  double rank_weight_;  // sum_{i=1..m0} i^(2/D)
};

}  // namespace ngas
