#include "ngas/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ngas/error.hpp"
#include "ngas/kernels.hpp"

namespace ngas {

std::size_t optimal_m0(std::size_t n, std::size_t dim) {
  if (n <= 1) return 1;
  const double x = std::pow(static_cast<double>(n), 4.0 / (static_cast<double>(dim) + 4.0));
  const auto m = static_cast<std::size_t>(std::floor(x + 0.5));
  return std::clamp<std::size_t>(m, 1, n);
}

double unit_ball_volume(std::size_t dim) {
  const double half = 0.5 * static_cast<double>(dim);
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

DensityTable density_table(const Codebook& codebook, const PointCloud& data_cloud) {
  const std::size_t k = codebook.k();
  const std::size_t dim = codebook.dim();
  if (k < 2) throw InvalidInput("density table needs k >= 2");
  if (data_cloud.empty()) throw InvalidInput("density table needs a non-empty data cloud");
  if (data_cloud.dim() != dim) throw InvalidInput("density table: dimension mismatch");

  DensityTable table;
  table.dim = dim;
  table.m0_data = optimal_m0(data_cloud.size(), dim);
  table.m0_units = std::min(optimal_m0(k, dim), k - 1);

  const DensityIndex data_index(data_cloud, table.m0_data);
  const DensityIndex unit_index(codebook.units(), table.m0_units);
  const auto data_kd = parallel::kdistances(data_index, codebook.units(), false);
  const auto unit_kd = parallel::kdistances(unit_index, codebook.units(), true);

  table.rows.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    DensityRow& row = table.rows[i];
    row.unit = i;
    row.position.assign(codebook.unit(i).begin(), codebook.unit(i).end());
    try {
      row.p_hat = data_index.estimate_from_kdistance(data_kd[i], data_index.size());
    } catch (const SingularEstimate&) {
      throw SingularEstimate("unit " + std::to_string(i) +
                                 " coincides with m0 data points (zero k-distance)",
                             i);
    }
    try {
      row.rho_hat = static_cast<double>(k) *
                    unit_index.estimate_from_kdistance(unit_kd[i], unit_index.size() - 1);
    } catch (const SingularEstimate&) {
      throw SingularEstimate("unit " + std::to_string(i) +
                                 " duplicates its codebook neighbors (zero k-distance)",
                             i);
    }
    row.log10_p = std::log10(row.p_hat);
    row.log10_rho = std::log10(row.rho_hat);
  }
  return table;
}

std::vector<std::size_t> winner_counts(const Codebook& codebook, const PointCloud& signals) {
  if (signals.empty()) throw InvalidInput("winner histogram needs at least one signal");
  if (signals.dim() != codebook.dim()) throw InvalidInput("winner histogram: dimension mismatch");
  std::vector<std::size_t> counts(codebook.k(), 0);
  for (auto w : parallel::nearest_units(codebook.units(), signals)) ++counts[w];
  return counts;
}

std::vector<double> winner_histogram(const Codebook& codebook, const PointCloud& signals) {
  const auto counts = winner_counts(codebook, signals);
  const double s = static_cast<double>(signals.size());
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / s;
  return p;
}

double entropy(std::span<const double> p) {
  if (p.empty()) throw InvalidInput("entropy of an empty vector");
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw InvalidInput("entropy: probabilities must be finite and >= 0");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("entropy: probabilities do not sum to 1");
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

double proximity(const Codebook& codebook, const SphereReference& reference) {
  if (reference.center.size() != codebook.dim())
    throw InvalidInput("proximity: reference center dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < codebook.k(); ++i) {
    const auto w = codebook.unit(i);
    const double r = std::sqrt(squared_distance(w, reference.center));
    worst = std::max(worst, std::abs(r - reference.radius));
  }
  return worst;
}

double proximity(const Codebook& codebook, const KdTree& reference) {
  if (reference.dim() != codebook.dim()) throw InvalidInput("proximity: dimension mismatch");
  return parallel::directed_distance(codebook.units(), reference);
}

double proximity(const Codebook& codebook, const PointCloud& reference) {
  if (reference.empty()) throw InvalidInput("proximity: empty reference cloud");
  if (reference.dim() != codebook.dim()) throw InvalidInput("proximity: dimension mismatch");
  return proximity(codebook, KdTree(reference));
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw InvalidInput("hausdorff: empty cloud");
  if (a.dim() != b.dim()) throw InvalidInput("hausdorff: dimension mismatch");
  const KdTree ta(a), tb(b);
  return std::max(parallel::directed_distance(a, tb), parallel::directed_distance(b, ta));
}

PowerLawFit fit_power_law(const DensityTable& table, double trim_top_fraction) {
  if (!(trim_top_fraction >= 0.0) || trim_top_fraction >= 1.0)
    throw InvalidInput("trim fraction must lie in [0, 1)");
  std::vector<const DensityRow*> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const DensityRow* a, const DensityRow* b) { return a->rho_hat > b->rho_hat; });
  const auto drop = static_cast<std::size_t>(
      std::floor(trim_top_fraction * static_cast<double>(rows.size())));
  if (rows.size() - drop < 10)
    throw InvalidInput("power-law fit needs at least 10 rows after trimming, have " +
                       std::to_string(rows.size() - drop));

  const std::size_t n = rows.size() - drop;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const DensityRow& r = *rows[drop + i];
    if (!(r.p_hat > 0.0) || !(r.rho_hat > 0.0))
      throw InvalidInput("power-law fit needs positive densities");
    x[i] = std::log(r.p_hat);
    y[i] = std::log(r.rho_hat);
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InvalidInput("power-law fit: all P-hat values are equal");

  PowerLawFit fit;
  fit.alpha = sxy / sxx;
  fit.intercept = my - fit.alpha * mx;
  fit.rows_used = n;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

std::string_view to_string(PhaseLabel label) {
  switch (label) {
    case PhaseLabel::Solid:
      return "solid";
    case PhaseLabel::ShellPlusCore:
      return "shell_plus_core";
    case PhaseLabel::Shell:
      return "shell";
  }
  return "unknown";
}

PhaseLabel phase_from_string(std::string_view s) {
  if (s == "solid") return PhaseLabel::Solid;
  if (s == "shell_plus_core") return PhaseLabel::ShellPlusCore;
  if (s == "shell") return PhaseLabel::Shell;
  throw InvalidInput("unknown phase label '" + std::string(s) + "'");
}

double ks_power_cdf(std::vector<double> sample, double power) {
  if (sample.empty()) throw InvalidInput("KS statistic of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = std::pow(std::clamp(sample[i], 0.0, 1.0), power);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

PhaseLabel radial_profile_classify(const Codebook& codebook, std::span<const double> center,
                                   const PhaseThresholds& thresholds) {
  const std::size_t k = codebook.k();
  if (k < 32) throw InvalidInput("phase classification needs k >= 32");
  if (center.size() != codebook.dim()) throw InvalidInput("phase center dimension mismatch");

  bool all_equal = true;
  for (std::size_t i = 1; i < k && all_equal; ++i)
    all_equal = squared_distance(codebook.unit(i), codebook.unit(0)) == 0.0;
  if (all_equal) throw DegenerateConfiguration("all units coincide");

  std::vector<double> radii(k);
  for (std::size_t i = 0; i < k; ++i) radii[i] = std::sqrt(squared_distance(codebook.unit(i), center));
  const double rmax = *std::max_element(radii.begin(), radii.end());
  if (!(rmax > 0.0)) throw DegenerateConfiguration("all units sit at the center");
  for (double& r : radii) r /= rmax;
  std::sort(radii.begin(), radii.end());

  // Mode of the radii under a box kernel of half-width shell_band: the window
  // of width 2 * band holding the most radii.
  std::size_t best = 0;
  for (std::size_t lo = 0, hi = 0; lo < k; ++lo) {
    while (hi < k && radii[hi] <= radii[lo] + 2.0 * thresholds.shell_band) ++hi;
    best = std::max(best, hi - lo);
  }
  if (static_cast<double>(best) >= thresholds.shell_fraction * static_cast<double>(k))
    return PhaseLabel::Shell;

  if (ks_power_cdf(radii, static_cast<double>(codebook.dim())) < thresholds.solid_ks)
    return PhaseLabel::Solid;
  return PhaseLabel::ShellPlusCore;
}

}  // namespace ngas
