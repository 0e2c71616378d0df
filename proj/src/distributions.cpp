#include "ngas/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ngas/error.hpp"

namespace ngas {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void uniform_in_ball(std::span<double> out, double radius, Rng& rng) {
  random_direction(out, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rho = radius * std::pow(u(rng), 1.0 / static_cast<double>(out.size()));
  for (double& x : out) x *= rho;
}

}  // namespace

void random_direction(std::span<double> out, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& x : out) {
      x = g(rng);
      n2 += x * x;
    }
  } while (n2 < 1e-300);
  const double inv = 1.0 / std::sqrt(n2);
  for (double& x : out) x *= inv;
}

std::size_t ambient_dim(const ShapeSpec& shape) {
  return std::visit(overloaded{
                        [](const PointShape& s) { return s.center.size(); },
                        [](const CircleShape&) -> std::size_t { return 2; },
                        [](const DiskShape&) -> std::size_t { return 2; },
                        [](const SphereShape&) -> std::size_t { return 3; },
                        [](const BallShape& s) { return s.center.size(); },
                        [](const MeshCloudShape& s) { return s.cloud.dim(); },
                    },
                    shape);
}

void validate(const ShapeSpec& shape) {
  std::visit(overloaded{
                 [](const PointShape& s) {
                   if (s.center.empty()) throw InvalidInput("point shape needs a center");
                 },
                 [](const CircleShape&) {},
                 [](const DiskShape&) {},
                 [](const SphereShape&) {},
                 [](const BallShape& s) {
                   if (s.center.empty()) throw InvalidInput("ball shape needs a center");
                   if (!(s.radius > 0.0)) throw InvalidInput("ball radius must be > 0");
                 },
                 [](const MeshCloudShape& s) {
                   if (s.cloud.empty()) throw InvalidInput("mesh cloud shape is empty");
                 },
             },
             shape);
}

void validate(const NoiseSpec& noise) {
  std::visit(overloaded{
                 [](const NoNoise&) {},
                 [](const GaussianNoise& n) {
                   if (!(n.sigma > 0.0)) throw InvalidInput("gaussian sigma must be > 0");
                 },
                 [](const SinusoidalNoise& n) {
                   if (!(n.radius > 0.0)) throw InvalidInput("sinusoidal radius must be > 0");
                 },
                 [](const UniformBallNoise& n) {
                   if (!(n.radius > 0.0)) throw InvalidInput("uniform-ball radius must be > 0");
                 },
             },
             noise);
}

PointCloud sample_shape(const ShapeSpec& shape, std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidInput("sample count must be >= 1");
  validate(shape);
  const std::size_t dim = ambient_dim(shape);
  PointCloud out(dim);
  out.reserve(n);
  Point p(dim);

  std::visit(overloaded{
                 [&](const PointShape& s) {
                   for (std::size_t i = 0; i < n; ++i) out.push_back(s.center);
                 },
                 [&](const CircleShape&) {
                   for (std::size_t i = 0; i < n; ++i) {
                     random_direction(p, rng);
                     out.push_back(p);
                   }
                 },
                 [&](const DiskShape&) {
                   for (std::size_t i = 0; i < n; ++i) {
                     uniform_in_ball(p, 1.0, rng);
                     out.push_back(p);
                   }
                 },
                 [&](const SphereShape&) {
                   for (std::size_t i = 0; i < n; ++i) {
                     random_direction(p, rng);
                     out.push_back(p);
                   }
                 },
                 [&](const BallShape& s) {
                   for (std::size_t i = 0; i < n; ++i) {
                     uniform_in_ball(p, s.radius, rng);
                     for (std::size_t j = 0; j < dim; ++j) p[j] += s.center[j];
                     out.push_back(p);
                   }
                 },
                 [&](const MeshCloudShape& s) {
                   const PointCloud source =
                       s.normalize ? normalize_mesh_cloud(s.cloud).cloud : s.cloud;
                   std::uniform_int_distribution<std::size_t> pick(0, source.size() - 1);
                   for (std::size_t i = 0; i < n; ++i) out.push_back(source[pick(rng)]);
                 },
             },
             shape);
  return out;
}

void sample_noise(const NoiseSpec& noise, std::span<double> out, Rng& rng) {
  validate(noise);
  std::visit(overloaded{
                 [&](const NoNoise&) { std::fill(out.begin(), out.end(), 0.0); },
                 [&](const GaussianNoise& g) {
                   std::normal_distribution<double> normal(0.0, g.sigma);
                   for (double& x : out) x = normal(rng);
                 },
                 [&](const SinusoidalNoise& s) {
                   // Rejection against the radial profile cos(pi/2 * rho/r),
                   // which equals sin(pi/2 + pi/2 * rho/r), bounded by 1.
                   std::uniform_real_distribution<double> u(0.0, 1.0);
                   for (;;) {
                     uniform_in_ball(out, s.radius, rng);
                     const double rho = norm(out);
                     if (rho >= s.radius) continue;
                     const double accept = std::cos(0.5 * std::numbers::pi * rho / s.radius);
                     if (u(rng) < accept) return;
                   }
                 },
                 [&](const UniformBallNoise& b) { uniform_in_ball(out, b.radius, rng); },
             },
             noise);
}

namespace {

NoiseSpec scaled(const NoiseSpec& noise, double factor) {
  return std::visit(overloaded{
                        [](const NoNoise& n) -> NoiseSpec { return n; },
                        [&](const GaussianNoise& n) -> NoiseSpec {
                          return GaussianNoise{n.sigma * factor};
                        },
                        [&](const SinusoidalNoise& n) -> NoiseSpec {
                          return SinusoidalNoise{n.radius * factor};
                        },
                        [&](const UniformBallNoise& n) -> NoiseSpec {
                          return UniformBallNoise{n.radius * factor};
                        },
                    },
                    noise);
}

}  // namespace

PointCloud generate_dataset(const DatasetSpec& spec) {
  if (spec.n_points == 0) throw InvalidInput("dataset needs n_points >= 1");
  validate(spec.shape);
  validate(spec.noise);

  NoiseSpec noise = spec.noise;
  if (spec.noise_relative_to_side) {
    const auto* mesh = std::get_if<MeshCloudShape>(&spec.shape);
    if (!mesh) throw InvalidInput("noise relative to side length needs a mesh cloud shape");
    const double side = normalize_mesh_cloud(mesh->cloud).side_length;
    if (!(side > 0.0))
      throw InvalidInput("degenerate mesh cloud: bounding-cube side length is 0");
    noise = scaled(noise, side);
  }

  Rng rng(spec.seed);
  PointCloud cloud = sample_shape(spec.shape, spec.n_points, rng);
  Point offset(cloud.dim());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    sample_noise(noise, offset, rng);
    auto p = cloud[i];
    for (std::size_t j = 0; j < offset.size(); ++j) p[j] += offset[j];
  }
  return cloud;
}

NormalizedCloud normalize_mesh_cloud(const PointCloud& cloud) {
  if (cloud.empty()) throw InvalidInput("cannot normalize an empty cloud");
  const std::size_t dim = cloud.dim();
  Point lo(cloud[0].begin(), cloud[0].end()), hi = lo;
  for (std::size_t i = 1; i < cloud.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      lo[j] = std::min(lo[j], cloud[i][j]);
      hi[j] = std::max(hi[j], cloud[i][j]);
    }
  }
  NormalizedCloud out{cloud, 0.0};
  for (std::size_t j = 0; j < dim; ++j) {
    const double mid = 0.5 * (lo[j] + hi[j]);
    out.side_length = std::max(out.side_length, hi[j] - lo[j]);
    for (std::size_t i = 0; i < out.cloud.size(); ++i) out.cloud[i][j] -= mid;
  }
  return out;
}

}  // namespace ngas
