#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ngas/core.hpp"
#include "ngas/point_cloud.hpp"
#include "ngas/spatial.hpp"

namespace ngas {

/// round(N^(4/(D+4))) clamped to [1, N].
std::size_t optimal_m0(std::size_t n, std::size_t dim);

/// pi^(D/2) / Gamma(D/2 + 1).
double unit_ball_volume(std::size_t dim);

inline double kdistance(const DensityIndex& index, std::span<const double> x) {
  return index.kdistance(x);
}
inline double estimate_density(const DensityIndex& index, std::span<const double> x) {
  return index.estimate(x);
}

// ---------------------------------------------------------------------------
// Density tables

struct DensityRow {
  std::size_t unit = 0;
  Point position;
  double p_hat = 0.0;    // data density at the unit
  double rho_hat = 0.0;  // codebook density at the unit
  double log10_p = 0.0;
  double log10_rho = 0.0;
};

struct DensityTable {
  std::size_t dim = 0;
  std::size_t m0_data = 0;
  std::size_t m0_units = 0;
  std::vector<DensityRow> rows;
};

/// P-hat over the data cloud (m0 = optimal_m0(N, D)) and rho-hat over the
/// codebook. rho-hat is k times the leave-one-out estimate over the other
/// k-1 units, m0 = min(optimal_m0(k, D), k - 1). Requires k >= 2.
DensityTable density_table(const Codebook& codebook, const PointCloud& data_cloud);

// ---------------------------------------------------------------------------
// Winner statistics

/// Signals per Voronoi cell (nearest unit, ties to the lower index).
std::vector<std::size_t> winner_counts(const Codebook& codebook, const PointCloud& signals);

/// winner_counts normalized by the signal count.
std::vector<double> winner_histogram(const Codebook& codebook, const PointCloud& signals);

/// Shannon entropy -sum p ln p. Throws InvalidInput unless p is a probability
/// vector (entries >= 0, sum within 1e-9 of 1).
double entropy(std::span<const double> p);

// ---------------------------------------------------------------------------
// Geometric proximity

/// Analytic circle/sphere reference: all points at `radius` from `center`.
struct SphereReference {
  Point center;
  double radius = 1.0;
};

/// max over units of | |w - center| - radius |.
double proximity(const Codebook& codebook, const SphereReference& reference);

/// max over units of the distance to the nearest reference point.
double proximity(const Codebook& codebook, const PointCloud& reference);
double proximity(const Codebook& codebook, const KdTree& reference);

/// Symmetric Hausdorff distance between two finite clouds.
double hausdorff(const PointCloud& a, const PointCloud& b);

// ---------------------------------------------------------------------------
// Power-law fit

struct PowerLawFit {
  double alpha = 0.0;      // slope of ln rho on ln P
  double intercept = 0.0;  // natural-log intercept
  double r2 = 0.0;
  std::size_t rows_used = 0;
};

/// OLS of ln rho-hat on ln P-hat after dropping the trim_top_fraction of rows
/// with the largest rho-hat. Needs at least 10 rows left.
PowerLawFit fit_power_law(const DensityTable& table, double trim_top_fraction = 0.05);

// ---------------------------------------------------------------------------
// Radial phase classification

enum class PhaseLabel { Solid, ShellPlusCore, Shell };

std::string_view to_string(PhaseLabel label);
PhaseLabel phase_from_string(std::string_view s);

struct PhaseThresholds {
  double shell_band = 0.1;      // half-width around the radial mode
  double shell_fraction = 0.95;
  double solid_ks = 0.15;       // max KS distance from F(r) = r^D
};

/// Classifies the radial profile of a codebook around `center`. Radii are
/// normalized by their maximum. Shell when at least shell_fraction of them lie
/// within shell_band of the mode; Solid when their CDF is within solid_ks of
/// r^D; ShellPlusCore otherwise. Requires k >= 32.
PhaseLabel radial_profile_classify(const Codebook& codebook, std::span<const double> center,
                                   const PhaseThresholds& thresholds = {});

/// Kolmogorov-Smirnov distance of a sample from the CDF F(x) = x^power on [0,1].
double ks_power_cdf(std::vector<double> sample, double power);

}  // namespace ngas
