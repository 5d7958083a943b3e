#pragma once

#include <Eigen/Dense>

#include "eigen_util.hpp"
#include "idlab/point_cloud.hpp"

namespace idlab::detail {

/// Eigen-decomposition of the sample covariance of a mean-centered cloud,
/// via the D x D covariance or the N x N Gram matrix, whichever is smaller.
/// Eigenvalues ascend.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  // Whitened coordinates along eigen-direction m are scores.col(m) /
  // sqrt(eigenvalues[m]); filled only when requested.
  RowMatrix scores;
};

Spectrum covariance_spectrum(const PointCloud& cloud, bool want_scores);

}  // namespace idlab::detail
