#include "ngas/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ngas/error.hpp"
#include "ngas/estimation.hpp"

namespace ngas {

namespace {

bool nearer(const Neighbor& a, const Neighbor& b) {
  return a.sq_dist < b.sq_dist || (a.sq_dist == b.sq_dist && a.index < b.index);
}

}  // namespace

KdTree::KdTree(PointCloud cloud, std::size_t leaf_size)
    : cloud_(std::move(cloud)), leaf_size_(std::max<std::size_t>(1, leaf_size)) {
  if (cloud_.empty()) throw InvalidInput("cannot index an empty cloud");
  if (cloud_.size() > 0xffffffffu) throw InvalidInput("cloud too large for a 32-bit index");
  perm_.resize(cloud_.size());
  std::iota(perm_.begin(), perm_.end(), std::uint32_t{0});
  nodes_.reserve(2 * cloud_.size() / leaf_size_ + 1);
  build(0, static_cast<std::uint32_t>(perm_.size()));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({});
  if (end - begin <= leaf_size_) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }

  // Split the widest extent at its median.
  const std::size_t dim = cloud_.dim();
  std::uint32_t best_dim = 0;
  double best_spread = -1.0;
  for (std::uint32_t j = 0; j < dim; ++j) {
    double lo = cloud_[perm_[begin]][j], hi = lo;
    for (std::uint32_t i = begin + 1; i < end; ++i) {
      const double c = cloud_[perm_[i]][j];
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = j;
    }
  }
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return cloud_[a][best_dim] < cloud_[b][best_dim];
                   });
  const double split = cloud_[perm_[mid]][best_dim];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node& node = nodes_[id];
  node.split_dim = best_dim;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void KdTree::search(std::int32_t id, std::span<const double> q, std::size_t m,
                    std::vector<Neighbor>& heap) const {
  const Node& node = nodes_[id];
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const Neighbor cand{perm_[i], squared_distance(q, cloud_[perm_[i]])};
      if (heap.size() < m) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), nearer);
      } else if (nearer(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), nearer);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), nearer);
      }
    }
    return;
  }
  const double diff = q[node.split_dim] - node.split;
  const std::int32_t near = diff <= 0.0 ? node.left : node.right;
  const std::int32_t far = diff <= 0.0 ? node.right : node.left;
  search(near, q, m, heap);
  // <= keeps equal-distance candidates reachable for the index tie-break.
  if (heap.size() < m || diff * diff <= heap.front().sq_dist) search(far, q, m, heap);
}

void KdTree::knn(std::span<const double> q, std::size_t m, std::vector<Neighbor>& out) const {
  if (q.size() != cloud_.dim())
    throw InvalidInput("query dimension " + std::to_string(q.size()) +
                       " does not match index dimension " + std::to_string(cloud_.dim()));
  m = std::min(m, cloud_.size());
  out.clear();
  if (m == 0) return;
  out.reserve(m);
  search(0, q, m, out);
  std::sort_heap(out.begin(), out.end(), nearer);
}

std::vector<Neighbor> KdTree::knn(std::span<const double> q, std::size_t m) const {
  std::vector<Neighbor> out;
  knn(q, m, out);
  return out;
}

Neighbor KdTree::nearest(std::span<const double> q) const {
  std::vector<Neighbor> out;
  knn(q, 1, out);
  return out.front();
}

std::vector<Neighbor> brute_force_knn(const PointCloud& cloud, std::span<const double> q,
                                      std::size_t m) {
  std::vector<Neighbor> all(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i)
    all[i] = {static_cast<std::uint32_t>(i), squared_distance(q, cloud[i])};
  std::sort(all.begin(), all.end(), nearer);
  all.resize(std::min(m, all.size()));
  return all;
}

DensityIndex::DensityIndex(PointCloud cloud, std::size_t m0)
    : tree_(std::move(cloud)), m0_(m0) {
  if (m0_ < 1 || m0_ > tree_.size())
    throw InvalidInput("m0 = " + std::to_string(m0_) + " outside [1, " +
                       std::to_string(tree_.size()) + "]");
  const double expo = 2.0 / static_cast<double>(dim());
  rank_weight_ = 0.0;
  for (std::size_t i = 1; i <= m0_; ++i) rank_weight_ += std::pow(static_cast<double>(i), expo);
}

std::vector<Neighbor> DensityIndex::neighbors(std::span<const double> x) const {
  return tree_.knn(x, m0_);
}

double DensityIndex::kdistance(std::span<const double> x) const {
  thread_local std::vector<Neighbor> nb;
  tree_.knn(x, m0_, nb);
  double s = 0.0;
  for (const auto& n : nb) s += n.sq_dist;
  return std::sqrt(s / static_cast<double>(m0_));
}

double DensityIndex::kdistance_excluding(std::span<const double> x, std::size_t self) const {
  if (m0_ >= size())
    throw InvalidInput("self-excluding k-distance needs m0 < N");
  thread_local std::vector<Neighbor> nb;
  tree_.knn(x, m0_ + 1, nb);
  auto it = std::find_if(nb.begin(), nb.end(), [&](const Neighbor& n) { return n.index == self; });
  if (it == nb.end()) it = nb.end() - 1;
  nb.erase(it);
  double s = 0.0;
  for (const auto& n : nb) s += n.sq_dist;
  return std::sqrt(s / static_cast<double>(m0_));
}

double DensityIndex::estimate_from_kdistance(double kdist, std::size_t n) const {
  if (!(kdist > 0.0)) throw SingularEstimate("zero k-distance: point repeated at least m0 times");
  const double d = static_cast<double>(dim());
  const double inner = rank_weight_ / (static_cast<double>(m0_) * kdist * kdist);
  return std::pow(inner, d / 2.0) / (static_cast<double>(n) * unit_ball_volume(dim()));
}

double DensityIndex::estimate(std::span<const double> x) const {
  return estimate_from_kdistance(kdistance(x), size());
}

double DensityIndex::estimate_excluding(std::span<const double> x, std::size_t self) const {
  return estimate_from_kdistance(kdistance_excluding(x, self), size() - 1);
}

}  // namespace ngas
