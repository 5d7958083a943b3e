#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace idlab {

/// Inseparability probability of the uniform distribution on the d-sphere
/// S^d in R^(d+1): P(<x, y> >= alpha) for independent x, y, i.e. the upper
/// tail of one coordinate, 0.5 * I_{1 - alpha^2}(d / 2, 1 / 2) for alpha >= 0.
double sphere_inseparability(double alpha, double d);

/// Table of sphere_inseparability over d = 1..max_dim and an alpha grid,
/// persisted as an NPY matrix (rows d, columns alpha) plus a JSON sidecar
/// with both grids.
class FisherCalibration {
 public:
  static constexpr std::size_t kMaxDim = 64;

  explicit FisherCalibration(std::vector<double> alphas);

  /// Process-wide instance for a grid, loaded from cache_dir() when a
  /// matching table exists and written there otherwise.
  static const FisherCalibration& for_grid(std::span<const double> alphas);

  static std::filesystem::path cache_dir();

  const std::vector<double>& alphas() const noexcept { return alphas_; }
  double at(std::size_t d, std::size_t alpha_index) const;

  /// Continuous d with p_cal(alpha, d) = p, log-linear in d between grid
  /// dimensions; clamped to [1, kMaxDim] with `clamped` set.
  double invert(std::size_t alpha_index, double p, bool* clamped = nullptr) const;

  void save(const std::filesystem::path& dir) const;
  /// False when the files are missing, unreadable or describe another grid.
  static bool load(const std::filesystem::path& dir, std::span<const double> alphas,
                   FisherCalibration& out);

 private:
  FisherCalibration() = default;
  std::vector<double> alphas_;
  std::vector<double> table_;  // kMaxDim x alphas, row d-1
};

}  // namespace idlab
