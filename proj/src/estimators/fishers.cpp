#include <algorithm>
#include <cmath>
#include <string>

#include "estimators/spectrum.hpp"
#include "idlab/errors.hpp"
#include "idlab/estimators.hpp"
#include "idlab/fisher_calibration.hpp"
#include "idlab/parallel.hpp"

namespace idlab {
namespace {

using detail::RowMatrix;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Whitened, sphere-projected points.
RowMatrix sphere_projection(const PointCloud& cloud, double cond, std::size_t& retained,
                            std::size_t& dropped) {
  const auto s = detail::covariance_spectrum(cloud, true);
  const double lmax = s.eigenvalues.maxCoeff();
  if (!(lmax > 0.0)) throw DegenerateError("all points identical: covariance is zero");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index m = 0; m < s.eigenvalues.size(); ++m) {
    if (s.eigenvalues[m] > lmax / cond) keep.push_back(m);
  }
  retained = keep.size();

  RowMatrix y(static_cast<Eigen::Index>(cloud.n()), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    y.col(static_cast<Eigen::Index>(c)) = s.scores.col(keep[c]) / std::sqrt(s.eigenvalues[keep[c]]);
  }
  // Points at the centroid have no direction; they are left out.
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const double norm = y.row(i).norm();
    if (norm > 0.0) {
      y.row(i) /= norm;
      rows.push_back(i);
    }
  }
  dropped = cloud.n() - rows.size();
  if (dropped == 0) return y;
  RowMatrix out(static_cast<Eigen::Index>(rows.size()), y.cols());
  for (std::size_t m = 0; m < rows.size(); ++m) out.row(static_cast<Eigen::Index>(m)) = y.row(rows[m]);
  return out;
}

}  // namespace

IdEstimate estimate_fishers(const PointCloud& cloud, double cond, const std::vector<double>& alphas) {
  if (cloud.n() < 50) throw SampleError("fishers needs at least 50 points");
  if (alphas.empty() || !std::is_sorted(alphas.begin(), alphas.end())) {
    throw ParameterError("fishers alpha grid must be non-empty and ascending");
  }
  std::size_t retained = 0, dropped = 0;
  const RowMatrix y = sphere_projection(cloud, cond, retained, dropped);
  const std::size_t n = static_cast<std::size_t>(y.rows());
  if (n < 2) throw DegenerateError("fewer than two points off the centroid");
  const std::size_t na = alphas.size();

  // Ordered-pair counts with <x, y> >= alpha for each alpha; the mean over
  // points of the per-point fraction is total / (n (n - 1)).
  const std::size_t bs = 256;
  const std::size_t nblocks = (n + bs - 1) / bs;
  std::vector<std::uint64_t> per_block(nblocks * na, 0);
  parallel_for_chunks(nblocks, 1, [&](std::size_t b0, std::size_t b1) {
    RowMatrix gram;
    std::vector<std::uint64_t> hist(na + 1);
    for (std::size_t blk = b0; blk < b1; ++blk) {
      const std::size_t r0 = blk * bs;
      const std::size_t rows = std::min(bs, n - r0);
      const auto tail = static_cast<Eigen::Index>(n - r0);
      gram.noalias() = y.middleRows(static_cast<Eigen::Index>(r0), static_cast<Eigen::Index>(rows)) *
                       y.bottomRows(tail).transpose();
      std::fill(hist.begin(), hist.end(), 0);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = r + 1; j < n - r0; ++j) {
          const double dot = gram(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
          // Number of alphas <= dot.
          const auto h = static_cast<std::size_t>(
              std::upper_bound(alphas.begin(), alphas.end(), dot) - alphas.begin());
          ++hist[h];
        }
      }
      // Pairs in bin h satisfy dot >= alpha for alpha indices < h.
      std::uint64_t acc = 0;
      for (std::size_t a = na; a-- > 0;) {
        acc += hist[a + 1];
        per_block[blk * na + a] = 2 * acc;
      }
    }
  });

  const auto& calib = FisherCalibration::for_grid(alphas);
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
  std::vector<double> dims;
  std::size_t clamped_count = 0;
  for (std::size_t a = 0; a < na; ++a) {
    std::uint64_t total = 0;
    for (std::size_t blk = 0; blk < nblocks; ++blk) total += per_block[blk * na + a];
    const double p = static_cast<double>(total) / pairs;
    if (p <= 0.0 || p >= 1.0) continue;
    bool clamped = false;
    dims.push_back(calib.invert(a, p, &clamped));
    clamped_count += clamped ? 1 : 0;
  }
  if (dims.empty()) {
    throw InversionError("every alpha gives an inseparable fraction of 0 or 1");
  }

  IdEstimate e;
  e.value = median(dims);
  e.n_used = n;
  e.estimator = make_spec("fishers", {{"cond", cond},
                                      {"alpha_min", alphas.front()},
                                      {"alpha_max", alphas.back()},
                                      {"alpha_step", na > 1 ? (alphas.back() - alphas.front()) /
                                                                  static_cast<double>(na - 1)
                                                            : 0.02}});
  e.diagnostics["retained_dims"] = static_cast<double>(retained);
  e.diagnostics["alphas_used"] = static_cast<double>(dims.size());
  e.diagnostics["alphas_clamped"] = static_cast<double>(clamped_count);
  e.diagnostics["points_at_centroid"] = static_cast<double>(dropped);
  return e;
}

}  // namespace idlab
