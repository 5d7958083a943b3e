#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace idlab {

struct BenchOptions {
  std::size_t n = 10000;
  std::size_t ambient = 100;
  std::vector<std::size_t> nn_dims{1, 2, 5, 10};
  std::size_t pca_max_dim = 10;
  std::size_t fishers_max_dim = 10;
  std::uint64_t seed = 42;
};

struct BenchCell {
  std::string family;
  std::size_t d = 0;
  std::string estimator;
  double truth = 0.0;
  double value = 0.0;  // NaN when the estimator failed
  double tolerance = 0.0;
  bool pass = false;
  std::string error;
  double seconds = 0.0;
};

/// Band an estimator must land in: max(1, 0.2 d) for NN estimators, 0 for
/// PCA on a flat, 1.5 for FisherS on a sphere.
double bench_tolerance(const std::string& estimator, std::size_t d);

/// Accuracy matrix: NN estimators on uniform_ball and uniform_cube, PCA on
/// linear_subspace, FisherS on sphere_surface, all rotated into `ambient`.
std::vector<BenchCell> run_bench(const BenchOptions& options);

}  // namespace idlab
