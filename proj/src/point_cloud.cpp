#include "idlab/point_cloud.hpp"

#include <cmath>
#include <string>

#include "idlab/errors.hpp"

namespace idlab {

PointCloud::PointCloud(std::size_t n, std::size_t d, std::vector<double> data)
    : n_(n), d_(d), data_(std::move(data)) {
  if (n_ == 0 || d_ == 0) {
    throw ShapeError("point cloud needs at least one row and one column, got (" +
                     std::to_string(n_) + ", " + std::to_string(d_) + ")");
  }
  if (data_.size() != n_ * d_) {
    throw ShapeError("point cloud payload has " + std::to_string(data_.size()) +
                     " values, expected " + std::to_string(n_ * d_));
  }
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!std::isfinite(data_[k])) {
      const std::size_t r = k / d_;
      throw DataError("non-finite value at row " + std::to_string(r) + ", column " +
                          std::to_string(k % d_),
                      r);
    }
  }
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ShapeError("point cloud needs at least one row");
  const std::size_t d = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) {
      throw ShapeError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                       " columns, expected " + std::to_string(d));
    }
    data.insert(data.end(), rows[i].begin(), rows[i].end());
  }
  return PointCloud(rows.size(), d, std::move(data));
}

PointCloud PointCloud::select_rows(std::span<const std::size_t> indices) const {
  std::vector<double> out;
  out.reserve(indices.size() * d_);
  for (std::size_t i : indices) {
    if (i >= n_) throw IndexError("row index " + std::to_string(i) + " out of range", i);
    const auto r = row(i);
    out.insert(out.end(), r.begin(), r.end());
  }
  return PointCloud(indices.size(), d_, std::move(out));
}

LayerStack::LayerStack(std::vector<PointCloud> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw EmptyError("layer stack needs at least one layer");
  const auto& first = layers_.front();
  for (std::size_t j = 1; j < layers_.size(); ++j) {
    if (layers_[j].n() != first.n() || layers_[j].d() != first.d()) {
      throw ConsistencyError("layer " + std::to_string(j) + " has shape (" +
                                 std::to_string(layers_[j].n()) + ", " +
                                 std::to_string(layers_[j].d()) + "), layer 0 has (" +
                                 std::to_string(first.n()) + ", " + std::to_string(first.d()) +
                                 ")",
                             j);
    }
  }
}

}  // namespace idlab
