#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "idlab/point_cloud.hpp"

namespace idlab {

enum class ManifoldFamily {
  UniformBall,     // solid unit d-ball
  UniformCube,     // [0, 1]^d
  SphereSurface,   // unit S^d in R^(d+1)
  SwissRoll,       // d = 2 sheet rolled in R^3
  LinearSubspace,  // uniform coefficients in [-1, 1]^d on a d-flat
  GaussianBlob,    // isotropic standard normal in R^d
};

std::string_view to_string(ManifoldFamily family);
/// Throws ParameterError for unknown names.
ManifoldFamily parse_manifold_family(std::string_view name);

struct ManifoldSpec {
  ManifoldFamily family = ManifoldFamily::UniformBall;
  std::size_t d_intrinsic = 1;
  std::size_t d_ambient = 1;
  std::size_t n = 1;
  double noise_sigma = 0.0;
  std::uint64_t seed = 42;
};

/// Coordinates the family needs before padding (d + 1 for spheres, 3 for
/// the Swiss roll, d otherwise).
std::size_t minimal_embedding(ManifoldFamily family, std::size_t d_intrinsic);

struct GeneratedCloud {
  PointCloud cloud;
  std::size_t ground_truth_id;
};

/// Samples the manifold in its minimal embedding, zero-pads to d_ambient and
/// applies a seeded random rotation when padding was needed, then adds
/// isotropic noise. Deterministic for a given ManifoldSpec. Throws
/// ParameterError for an impossible embedding or empty sizes.
GeneratedCloud generate(const ManifoldSpec& spec);

/// Haar-random orthogonal matrix (row-major dim x dim) from the QR
/// factorization of a Gaussian matrix with sign-fixed diagonal.
std::vector<double> random_rotation(std::size_t dim, std::uint64_t seed);

}  // namespace idlab
