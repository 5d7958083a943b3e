#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace idlab {

/// Dense N x D row-major matrix of 64-bit reals, one row per datapoint.
/// Invariants: N >= 1, D >= 1, every entry finite. Immutable once built.
class PointCloud {
 public:
  /// Throws ShapeError on empty shapes or a size mismatch and DataError
  /// (carrying the row) on the first non-finite entry.
  PointCloud(std::size_t n, std::size_t d, std::vector<double> data);

  static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return d_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * d_, d_};
  }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * d_ + j]; }
  std::span<const double> data() const noexcept { return data_; }

  /// Rows in the order given; indices may repeat.
  PointCloud select_rows(std::span<const std::size_t> indices) const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<double> data_;
};

/// Per-layer representation matrices of one run. Layer 0 is the
/// contextualized-embedding output, then one layer per block.
class LayerStack {
 public:
  /// Throws EmptyError on an empty list and ConsistencyError (carrying the
  /// layer index) when a layer disagrees with layer 0 on N or D.
  explicit LayerStack(std::vector<PointCloud> layers);

  std::size_t layer_count() const noexcept { return layers_.size(); }
  std::size_t n() const noexcept { return layers_.front().n(); }
  std::size_t d() const noexcept { return layers_.front().d(); }
  const PointCloud& layer(std::size_t j) const { return layers_.at(j); }
  const std::vector<PointCloud>& layers() const noexcept { return layers_; }

 private:
  std::vector<PointCloud> layers_;
};

}  // namespace idlab
