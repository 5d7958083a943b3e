#pragma once

#include <Eigen/Dense>

#include "idlab/point_cloud.hpp"

namespace idlab::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const RowMatrix> as_matrix(const PointCloud& cloud) {
  return {cloud.data().data(), static_cast<Eigen::Index>(cloud.n()),
          static_cast<Eigen::Index>(cloud.d())};
}

}  // namespace idlab::detail
