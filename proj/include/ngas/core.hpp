#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "ngas/point_cloud.hpp"

namespace ngas {

/// Ordered set of k reference vectors in R^D. Unit indices are stable: training
/// moves units but never reorders them.
class Codebook {
 public:
  Codebook() = default;
  /// Throws InvalidInput when `units` is empty or has non-finite coordinates.
  explicit Codebook(PointCloud units);

  std::size_t k() const { return units_.size(); }
  std::size_t dim() const { return units_.dim(); }

  std::span<const double> unit(std::size_t i) const { return units_[i]; }
  std::span<double> unit(std::size_t i) { return units_[i]; }

  const PointCloud& units() const { return units_; }

  /// Number of training steps applied so far.
  std::uint64_t steps() const { return steps_; }
  void set_steps(std::uint64_t s) { steps_ = s; }

  friend bool operator==(const Codebook&, const Codebook&) = default;

 private:
  PointCloud units_;
  std::uint64_t steps_ = 0;
};

/// Draws k initial units from `cloud` without replacement (with replacement
/// when k > N).
Codebook init_from_cloud(const PointCloud& cloud, std::size_t k, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Kernel and schedules

/// Neighborhood kernel h_lambda(n): Kronecker delta at lambda = 0, else exp(-n/lambda).
double kernel(std::size_t rank, double lambda);

/// C_lambda = sum of kernel(i, lambda) for i in [0, k).
double kernel_normalization(std::size_t k, double lambda);

/// Exponential interpolation init * (final/init)^(t/T), with t/T clamped at 1.
double schedule_value(std::uint64_t t, std::uint64_t total, double init, double final);

struct ConstantLambda {
  double value = 0.0;
};

struct DecayingLambda {
  double initial = 10.0;
  double final = 0.01;
};

using LambdaMode = std::variant<ConstantLambda, DecayingLambda>;

struct TrainingSchedule {
  double eps_initial = 0.1;
  double eps_final = 1e-4;
  LambdaMode lambda = ConstantLambda{};
  std::uint64_t total_steps = 0;

  /// Throws InvalidInput when the bounds violate 0 < final <= initial.
  void validate() const;
  double epsilon_at(std::uint64_t t) const;
  double lambda_at(std::uint64_t t) const;
};

// ---------------------------------------------------------------------------
// Ranking and update

/// ranks[i] = number of units strictly closer to v than unit i, with equal
/// distances ordered by unit index so the result is a permutation of 0..k-1.
std::vector<std::size_t> rank_all(std::span<const double> v, const Codebook& codebook);

/// Reusable scratch for repeated NG steps on a codebook of fixed size.
///
/// Units whose kernel weight would fall below 2^-64 are not ranked. Their
/// displacement is smaller than the rounding of any coordinate larger than
/// ~1e-3 in magnitude, so skipping them only saves the full sort.
class Trainer {
 public:
  explicit Trainer(std::size_t k);

  /// One synchronous NG update: ranks come from the pre-step positions.
  /// Throws NumericFault when the update produces a non-finite coordinate.
  void step(Codebook& codebook, std::span<const double> v, double eps, double lambda);

 private:
  struct Key {
    double sq_dist;
    std::uint32_t unit;
  };
  std::vector<Key> keys_;
  std::vector<double> weights_;  // exp(-r / cached_lambda_)
  double cached_lambda_ = -1.0;
};

/// Single NG update with a throwaway Trainer.
void train_step(Codebook& codebook, std::span<const double> v, double eps, double lambda);

// ---------------------------------------------------------------------------
// Signal sources

class SignalSource {
 public:
  virtual ~SignalSource() = default;
  virtual std::size_t dim() const = 0;
  /// Writes the next signal into `out`; returns false when exhausted.
  virtual bool next(std::span<double> out) = 0;
};

/// Uniform draws with replacement from a fixed cloud.
class CloudSampler final : public SignalSource {
 public:
  CloudSampler(const PointCloud& cloud, std::uint64_t seed);
  std::size_t dim() const override { return cloud_->dim(); }
  bool next(std::span<double> out) override;

 private:
  const PointCloud* cloud_;
  std::mt19937_64 rng_;
  std::uniform_int_distribution<std::size_t> pick_;
};

/// Visits the cloud's points in order, wrapping around forever.
class CloudCycler final : public SignalSource {
 public:
  explicit CloudCycler(const PointCloud& cloud);
  std::size_t dim() const override { return cloud_->dim(); }
  bool next(std::span<double> out) override;

 private:
  const PointCloud* cloud_;
  std::size_t pos_ = 0;
};

/// Visits the cloud's points once, in order.
class SequenceSource final : public SignalSource {
 public:
  explicit SequenceSource(const PointCloud& cloud);
  std::size_t dim() const override { return cloud_->dim(); }
  bool next(std::span<double> out) override;

 private:
  const PointCloud* cloud_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Training loop

struct Snapshot {
  std::uint64_t step = 0;
  Codebook codebook;
};

struct TrainResult {
  Codebook codebook;
  std::vector<Snapshot> trace;
};

/// Runs schedule.total_steps NG updates. Step t (1-based) uses epsilon_at(t)
/// and lambda_at(t), so the last update uses the final values exactly.
/// With trace_every > 0, snapshots are taken at step 0 and at every multiple
/// of trace_every (plus the final step).
TrainResult train(Codebook initial, SignalSource& signals, const TrainingSchedule& schedule,
                  std::uint64_t trace_every = 0);

// ---------------------------------------------------------------------------
// Objectives (Monte-Carlo over a finite cloud)

/// NG energy: (1 / (2 C_lambda)) * mean_v sum_i h(k_i(v)) |v - w_i|^2.
double energy(const Codebook& codebook, const PointCloud& cloud, double lambda);

/// K-means distortion: 0.5 * mean_v min_i |v - w_i|^2.
double distortion(const Codebook& codebook, const PointCloud& cloud);

}  // namespace ngas
