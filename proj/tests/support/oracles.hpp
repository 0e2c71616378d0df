// Independent reference computations used only by the tests. Nothing in here
// calls into the library's ranking, training or estimation code.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Units = std::vector<Vec>;

inline double sq(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

/// Rank by counting strictly closer units, ties broken by index.
inline std::vector<std::size_t> ranks(const Units& w, const Vec& v) {
  std::vector<std::size_t> r(w.size(), 0);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double dj = sq(v, w[j]), di = sq(v, w[i]);
      if (dj < di || (dj == di && j < i)) ++r[i];
    }
  return r;
}

inline double h(std::size_t n, double lambda) {
  if (lambda == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-static_cast<double>(n) / lambda);
}

/// Full synchronous NG step from a frozen copy of the old positions.
inline Units ng_step(const Units& w, const Vec& v, double eps, double lambda) {
  const auto r = ranks(w, v);
  Units out = w;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i][j] = w[i][j] + eps * h(r[i], lambda) * (v[j] - w[i][j]);
  return out;
}

inline double c_lambda(std::size_t k, double lambda) {
  double c = 0.0;
  for (std::size_t i = 0; i < k; ++i) c += h(i, lambda);
  return c;
}

inline double energy(const Units& w, const std::vector<Vec>& cloud, double lambda) {
  double s = 0.0;
  for (const auto& v : cloud) {
    const auto r = ranks(w, v);
    for (std::size_t i = 0; i < w.size(); ++i) s += h(r[i], lambda) * sq(v, w[i]);
  }
  return s / (2.0 * c_lambda(w.size(), lambda) * static_cast<double>(cloud.size()));
}

/// Batch Lloyd iteration to a fixed point, 1D.
inline std::vector<double> lloyd_1d(const std::vector<double>& data, std::vector<double> c,
                                    int iters = 1000) {
  for (int it = 0; it < iters; ++it) {
    std::vector<double> sum(c.size(), 0.0);
    std::vector<std::size_t> cnt(c.size(), 0);
    for (double x : data) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < c.size(); ++i)
        if (std::abs(x - c[i]) < std::abs(x - c[best])) best = i;
      sum[best] += x;
      ++cnt[best];
    }
    for (std::size_t i = 0; i < c.size(); ++i)
      if (cnt[i]) c[i] = sum[i] / static_cast<double>(cnt[i]);
  }
  return c;
}

/// Kolmogorov-Smirnov distance of a sample from a CDF.
template <class Cdf>
double ks(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

}  // namespace oracle
