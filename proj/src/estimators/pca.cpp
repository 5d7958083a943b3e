#include <algorithm>
#include <cmath>

#include "estimators/spectrum.hpp"
#include "idlab/errors.hpp"
#include "idlab/estimators.hpp"

namespace idlab {
namespace detail {

Spectrum covariance_spectrum(const PointCloud& cloud, bool want_scores) {
  const auto x = as_matrix(cloud);
  const RowMatrix centered = x.rowwise() - x.colwise().mean();
  const double denom = static_cast<double>(cloud.n() - 1);
  Spectrum s;
  const auto opts = want_scores ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  if (cloud.d() <= cloud.n()) {
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, opts);
    s.eigenvalues = es.eigenvalues();
    if (want_scores) s.scores = centered * es.eigenvectors();
  } else {
    // Same non-zero spectrum as the covariance; scores are sqrt(N-1) * u * sqrt(lambda).
    const Eigen::MatrixXd gram = (centered * centered.transpose()) / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, opts);
    s.eigenvalues = es.eigenvalues();
    if (want_scores) {
      s.scores = es.eigenvectors();
      for (Eigen::Index m = 0; m < s.scores.cols(); ++m) {
        s.scores.col(m) *= std::sqrt(denom * std::max(0.0, s.eigenvalues[m]));
      }
    }
  }
  return s;
}

}  // namespace detail

IdEstimate estimate_pca(const PointCloud& cloud, double k) {
  if (cloud.n() < 2) throw SampleError("pca needs at least 2 points");
  if (!(k > 1.0)) throw ParameterError("pca threshold k must exceed 1");
  const auto s = detail::covariance_spectrum(cloud, false);
  const double lmax = s.eigenvalues.maxCoeff();
  if (!(lmax > 0.0)) throw DegenerateError("all points identical: covariance is zero");
  const double cut = lmax / k;
  const auto count = std::count_if(s.eigenvalues.begin(), s.eigenvalues.end(),
                                   [&](double l) { return l > cut; });
  IdEstimate e;
  e.value = static_cast<double>(count);
  e.n_used = cloud.n();
  e.estimator = make_spec("pca", {{"k", k}});
  e.diagnostics["lambda_max"] = lmax;
  e.diagnostics["threshold"] = cut;
  return e;
}

}  // namespace idlab
