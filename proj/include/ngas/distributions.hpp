#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <variant>

#include "ngas/point_cloud.hpp"

namespace ngas {

using Rng = std::mt19937_64;

// Shapes. Ambient dimension is implied by the variant (or by the center).

struct PointShape {
  Point center{0.0, 0.0};
};
struct CircleShape {};  // unit S^1 in R^2
struct DiskShape {};    // unit disk in R^2
struct SphereShape {};  // unit S^2 in R^3
struct BallShape {
  double radius = 1.0;
  Point center{0.0, 0.0, 0.0};
};
/// Draws uniformly among the points of an externally supplied cloud.
struct MeshCloudShape {
  PointCloud cloud;
  bool normalize = true;  // center the bounding box at the origin first
};

using ShapeSpec =
    std::variant<PointShape, CircleShape, DiskShape, SphereShape, BallShape, MeshCloudShape>;

// Isotropic noise models.

struct NoNoise {};
struct GaussianNoise {
  double sigma = 0.1;
};
/// Radial profile proportional to cos(pi/2 * |x|/r) on the open ball B(0, r).
struct SinusoidalNoise {
  double radius = 0.1;
};
struct UniformBallNoise {
  double radius = 0.1;
};

using NoiseSpec = std::variant<NoNoise, GaussianNoise, SinusoidalNoise, UniformBallNoise>;

struct DatasetSpec {
  ShapeSpec shape = PointShape{};
  NoiseSpec noise = NoNoise{};
  /// Multiply the noise scale by the mesh cloud's bounding-cube side l.
  bool noise_relative_to_side = false;
  std::size_t n_points = 100000;
  std::uint64_t seed = 1;
};

std::size_t ambient_dim(const ShapeSpec& shape);

/// Throws InvalidInput for non-positive radii/sigma, empty mesh clouds, etc.
void validate(const ShapeSpec& shape);
void validate(const NoiseSpec& noise);

/// n i.i.d. points uniform w.r.t. the shape's intrinsic measure.
PointCloud sample_shape(const ShapeSpec& shape, std::size_t n, Rng& rng);

/// Writes one noise offset into `out` (its size is the ambient dimension).
void sample_noise(const NoiseSpec& noise, std::span<double> out, Rng& rng);

/// Shape sample plus independent noise, N points, determined by spec.seed.
PointCloud generate_dataset(const DatasetSpec& spec);

struct NormalizedCloud {
  PointCloud cloud;
  double side_length = 0.0;
};

/// Translates the cloud so its bounding box is centered at the origin and
/// reports the largest bounding-box edge. Coordinates are not rescaled.
NormalizedCloud normalize_mesh_cloud(const PointCloud& cloud);

/// Uniform direction on S^{D-1}.
void random_direction(std::span<double> out, Rng& rng);

}  // namespace ngas
