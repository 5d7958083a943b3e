#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "idlab/point_cloud.hpp"

namespace idlab {

/// Exact k-NN table, self excluded. Row i holds the k nearest neighbors of
/// point i sorted by (distance, index).
struct NeighborTable {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<double> dist;      // n * k, row-major
  std::vector<std::size_t> idx;  // n * k, row-major

  std::span<const double> distances(std::size_t i) const { return {dist.data() + i * k, k}; }
  std::span<const std::size_t> indices(std::size_t i) const { return {idx.data() + i * k, k}; }
};

/// Euclidean distance, accumulated left to right over coordinates. Every
/// distance the library reports goes through this function.
double distance(std::span<const double> a, std::span<const double> b);

/// Exact Euclidean k-NN. Candidates are screened with the dot-product
/// expansion on a centered copy and a rigorous rounding margin, then
/// recomputed with distance(); the result is identical to a naive double
/// loop. Throws ParameterError when k == 0 or k >= N.
NeighborTable knn(const PointCloud& cloud, std::size_t k);

/// Condensed pairwise distances among `subset`, in (i < j) order of subset
/// positions. Throws IndexError on an out-of-range index and ParameterError on
/// a repeated one.
std::vector<double> pairwise_within(const PointCloud& cloud, std::span<const std::size_t> subset);

/// For each radius r, the number of unordered pairs i < j with
/// distance(x_i, x_j) < r, exact.
std::vector<std::uint64_t> count_pairs_below(const PointCloud& cloud,
                                             std::span<const double> radii);

}  // namespace idlab
