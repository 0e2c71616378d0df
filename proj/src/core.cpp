#include "ngas/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ngas/error.hpp"
#include "ngas/kernels.hpp"

namespace ngas {

namespace {

// exp(-n/lambda) < 2^-64 beyond this many lambdas.
constexpr double kKernelCutoff = 44.4;

void check_dim(std::span<const double> v, const Codebook& codebook) {
  if (v.size() != codebook.dim())
    throw InvalidInput("signal has dimension " + std::to_string(v.size()) +
                       ", codebook has dimension " + std::to_string(codebook.dim()));
}

}  // namespace

Codebook::Codebook(PointCloud units) : units_(std::move(units)) {
  if (units_.empty()) throw InvalidInput("codebook needs at least one unit");
  if (!units_.all_finite()) throw InvalidInput("codebook units must be finite");
}

Codebook init_from_cloud(const PointCloud& cloud, std::size_t k, std::mt19937_64& rng) {
  if (cloud.empty()) throw InvalidInput("cannot initialize a codebook from an empty cloud");
  if (k == 0) throw InvalidInput("k must be >= 1");
  const std::size_t n = cloud.size();
  PointCloud units(cloud.dim());
  units.reserve(k);
  if (k <= n) {
    // Partial Fisher-Yates over the index set.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(idx[i], idx[pick(rng)]);
      units.push_back(cloud[idx[i]]);
    }
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < k; ++i) units.push_back(cloud[pick(rng)]);
  }
  return Codebook(std::move(units));
}

double kernel(std::size_t rank, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidInput("kernel: lambda must be >= 0");
  if (lambda == 0.0) return rank == 0 ? 1.0 : 0.0;
  return std::exp(-static_cast<double>(rank) / lambda);
}

double kernel_normalization(std::size_t k, double lambda) {
  double c = 0.0;
  for (std::size_t i = 0; i < k; ++i) c += kernel(i, lambda);
  return c;
}

double schedule_value(std::uint64_t t, std::uint64_t total, double init, double final) {
  if (!(init > 0.0) || !(final > 0.0))
    throw InvalidInput("schedule bounds must be positive");
  if (t > total)
    throw InvalidInput("schedule step " + std::to_string(t) + " beyond total " +
                       std::to_string(total));
  if (t == 0 || total == 0) return init;
  if (t == total) return final;
  const double frac = std::min(1.0, static_cast<double>(t) / static_cast<double>(total));
  return init * std::pow(final / init, frac);
}

void TrainingSchedule::validate() const {
  if (!(eps_initial > 0.0) || !(eps_final > 0.0) || eps_initial > 1.0)
    throw InvalidInput("epsilon bounds must lie in (0, 1]");
  if (eps_final > eps_initial) throw InvalidInput("eps_final must not exceed eps_initial");
  if (const auto* c = std::get_if<ConstantLambda>(&lambda)) {
    if (!(c->value >= 0.0) || !std::isfinite(c->value))
      throw InvalidInput("constant lambda must be finite and >= 0");
  } else {
    const auto& d = std::get<DecayingLambda>(lambda);
    if (!(d.initial > 0.0) || !(d.final > 0.0))
      throw InvalidInput("decaying lambda bounds must be positive");
    if (d.final > d.initial) throw InvalidInput("lambda_final must not exceed lambda_initial");
  }
}

double TrainingSchedule::epsilon_at(std::uint64_t t) const {
  return schedule_value(std::min(t, total_steps), total_steps, eps_initial, eps_final);
}

double TrainingSchedule::lambda_at(std::uint64_t t) const {
  if (const auto* c = std::get_if<ConstantLambda>(&lambda)) return c->value;
  const auto& d = std::get<DecayingLambda>(lambda);
  return schedule_value(std::min(t, total_steps), total_steps, d.initial, d.final);
}

std::vector<std::size_t> rank_all(std::span<const double> v, const Codebook& codebook) {
  check_dim(v, codebook);
  const std::size_t k = codebook.k();
  std::vector<double> dist(k);
  for (std::size_t i = 0; i < k; ++i) {
    dist[i] = squared_distance(v, codebook.unit(i));
    if (!std::isfinite(dist[i])) throw InvalidInput("rank_all: non-finite distance");
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  });
  std::vector<std::size_t> ranks(k);
  for (std::size_t r = 0; r < k; ++r) ranks[order[r]] = r;
  return ranks;
}

Trainer::Trainer(std::size_t k) : keys_(k) {}

void Trainer::step(Codebook& codebook, std::span<const double> v, double eps, double lambda) {
  check_dim(v, codebook);
  if (!(eps > 0.0) || eps > 1.0) throw InvalidInput("train_step: eps must lie in (0, 1]");
  if (!(lambda >= 0.0)) throw InvalidInput("train_step: lambda must be >= 0");
  const std::size_t k = codebook.k();
  const std::size_t dim = codebook.dim();
  keys_.resize(k);
  for (std::size_t i = 0; i < k; ++i)
    keys_[i] = {squared_distance(v, codebook.unit(i)), static_cast<std::uint32_t>(i)};

  const auto closer = [](const Key& a, const Key& b) {
    return a.sq_dist < b.sq_dist || (a.sq_dist == b.sq_dist && a.unit < b.unit);
  };

  std::size_t ranked = 1;
  if (lambda == 0.0) {
    auto best = std::min_element(keys_.begin(), keys_.end(), closer);
    std::swap(keys_.front(), *best);
    weights_.assign(1, 1.0);
    cached_lambda_ = 0.0;
  } else {
    const double reach = std::ceil(kKernelCutoff * lambda) + 1.0;
    ranked = reach >= static_cast<double>(k) ? k : static_cast<std::size_t>(reach);
    if (ranked < k) std::nth_element(keys_.begin(), keys_.begin() + ranked, keys_.end(), closer);
    std::sort(keys_.begin(), keys_.begin() + ranked, closer);
    if (lambda != cached_lambda_ || weights_.size() < ranked) {
      weights_.resize(ranked);
      for (std::size_t r = 0; r < ranked; ++r)
        weights_[r] = std::exp(-static_cast<double>(r) / lambda);
      cached_lambda_ = lambda;
    }
  }

  // Each unit's move depends only on its own position and its pre-step rank,
  // so updating in rank order is the synchronous update.
  bool finite = true;
  for (std::size_t r = 0; r < ranked; ++r) {
    const double h = eps * weights_[r];
    auto w = codebook.unit(keys_[r].unit);
    for (std::size_t j = 0; j < dim; ++j) {
      w[j] += h * (v[j] - w[j]);
      finite = finite && std::isfinite(w[j]);
    }
  }
  if (!finite) throw NumericFault("non-finite unit after update");
  codebook.set_steps(codebook.steps() + 1);
}

void train_step(Codebook& codebook, std::span<const double> v, double eps, double lambda) {
  Trainer(codebook.k()).step(codebook, v, eps, lambda);
}

CloudSampler::CloudSampler(const PointCloud& cloud, std::uint64_t seed)
    : cloud_(&cloud), rng_(seed), pick_(0, cloud.empty() ? 0 : cloud.size() - 1) {
  if (cloud.empty()) throw InvalidInput("cannot sample signals from an empty cloud");
}

bool CloudSampler::next(std::span<double> out) {
  const auto p = (*cloud_)[pick_(rng_)];
  std::copy(p.begin(), p.end(), out.begin());
  return true;
}

CloudCycler::CloudCycler(const PointCloud& cloud) : cloud_(&cloud) {
  if (cloud.empty()) throw InvalidInput("cannot cycle an empty cloud");
}

bool CloudCycler::next(std::span<double> out) {
  const auto p = (*cloud_)[pos_];
  std::copy(p.begin(), p.end(), out.begin());
  pos_ = (pos_ + 1) % cloud_->size();
  return true;
}

SequenceSource::SequenceSource(const PointCloud& cloud) : cloud_(&cloud) {}

bool SequenceSource::next(std::span<double> out) {
  if (pos_ >= cloud_->size()) return false;
  const auto p = (*cloud_)[pos_++];
  std::copy(p.begin(), p.end(), out.begin());
  return true;
}

TrainResult train(Codebook initial, SignalSource& signals, const TrainingSchedule& schedule,
                  std::uint64_t trace_every) {
  schedule.validate();
  if (signals.dim() != initial.dim())
    throw InvalidInput("signal dimension " + std::to_string(signals.dim()) +
                       " does not match codebook dimension " + std::to_string(initial.dim()));
  TrainResult result{std::move(initial), {}};
  Codebook& cb = result.codebook;
  const std::uint64_t total = schedule.total_steps;
  if (trace_every > 0) result.trace.push_back({0, cb});

  Trainer trainer(cb.k());
  std::vector<double> v(cb.dim());
  for (std::uint64_t t = 1; t <= total; ++t) {
    if (!signals.next(v)) throw SignalExhausted(t - 1, total);
    trainer.step(cb, v, schedule.epsilon_at(t), schedule.lambda_at(t));
    if (trace_every > 0 && (t % trace_every == 0 || t == total)) result.trace.push_back({t, cb});
  }
  return result;
}

double energy(const Codebook& codebook, const PointCloud& cloud, double lambda) {
  if (cloud.empty()) throw InvalidInput("energy: empty cloud");
  if (cloud.dim() != codebook.dim()) throw InvalidInput("energy: dimension mismatch");
  if (!(lambda >= 0.0)) throw InvalidInput("energy: lambda must be >= 0");
  const double c = kernel_normalization(codebook.k(), lambda);
  const double sum = parallel::energy_sum(codebook.units(), cloud, lambda);
  return sum / (2.0 * c * static_cast<double>(cloud.size()));
}

double distortion(const Codebook& codebook, const PointCloud& cloud) {
  if (cloud.empty()) throw InvalidInput("distortion: empty cloud");
  if (cloud.dim() != codebook.dim()) throw InvalidInput("distortion: dimension mismatch");
  return 0.5 * parallel::distortion_sum(codebook.units(), cloud) /
         static_cast<double>(cloud.size());
}

}  // namespace ngas
