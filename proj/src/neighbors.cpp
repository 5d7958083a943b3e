#include "idlab/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "eigen_util.hpp"
#include "idlab/errors.hpp"
#include "idlab/parallel.hpp"

namespace idlab {
namespace {

using detail::RowMatrix;

// Centered copy and squared row norms used only for candidate screening.
struct Screen {
  RowMatrix centered;
  Eigen::VectorXd sq_norms;
  double max_sq_norm = 0.0;
  double margin_factor = 0.0;
};

Screen make_screen(const PointCloud& cloud) {
  Screen s;
  const auto x = detail::as_matrix(cloud);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  s.centered = x.rowwise() - mean;
  s.sq_norms = s.centered.rowwise().squaredNorm();
  s.max_sq_norm = s.sq_norms.maxCoeff();
  // |approx - exact| for ||a||^2 + ||b||^2 - 2 a.b is bounded by
  // ~2 (D + 3) u (||a||^2 + ||b||^2) for any summation order; the direct
  // difference-of-squares sum adds at most D u times the same scale. The
  // factor below covers both with slack.
  const double u = std::numeric_limits<double>::epsilon();
  s.margin_factor = 8.0 * (static_cast<double>(cloud.d()) + 4.0) * u;
  return s;
}

std::size_t block_rows(std::size_t n) {
  // Keep each block's Gram slab near 32 MB.
  const std::size_t target = (std::size_t{4} << 20) / std::max<std::size_t>(n, 1);
  return std::clamp<std::size_t>(target, 8, 256);
}

}  // namespace

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double diff = a[c] - b[c];
    s += diff * diff;
  }
  return std::sqrt(s);
}

NeighborTable knn(const PointCloud& cloud, std::size_t k) {
  const std::size_t n = cloud.n();
  if (k == 0 || k >= n) {
    throw ParameterError("knn needs 0 < k < N, got k=" + std::to_string(k) +
                         ", N=" + std::to_string(n));
  }
  const Screen screen = make_screen(cloud);

  NeighborTable t;
  t.n = n;
  t.k = k;
  t.dist.resize(n * k);
  t.idx.resize(n * k);

  const std::size_t bs = block_rows(n);
  const std::size_t nblocks = (n + bs - 1) / bs;

  parallel_for_chunks(nblocks, 1, [&](std::size_t b0, std::size_t b1) {
    RowMatrix gram;
    std::vector<double> approx(n), scratch(n);
    std::vector<std::pair<double, std::size_t>> cand;
    for (std::size_t blk = b0; blk < b1; ++blk) {
      const std::size_t r0 = blk * bs;
      const std::size_t rows = std::min(bs, n - r0);
      gram.noalias() = screen.centered.middleRows(static_cast<Eigen::Index>(r0),
                                                  static_cast<Eigen::Index>(rows)) *
                       screen.centered.transpose();
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t i = r0 + r;
        const double qn = screen.sq_norms[static_cast<Eigen::Index>(i)];
        for (std::size_t j = 0; j < n; ++j) {
          approx[j] = qn + screen.sq_norms[static_cast<Eigen::Index>(j)] -
                      2.0 * gram(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
        }
        approx[i] = std::numeric_limits<double>::infinity();

        std::copy(approx.begin(), approx.end(), scratch.begin());
        std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k - 1),
                         scratch.end());
        const double kth = scratch[k - 1];
        const double margin = screen.margin_factor * (qn + screen.max_sq_norm);
        const double cutoff = kth + 2.0 * margin;

        cand.clear();
        const auto qi = cloud.row(i);
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i && approx[j] <= cutoff) cand.emplace_back(distance(qi, cloud.row(j)), j);
        }
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
        for (std::size_t m = 0; m < k; ++m) {
          t.dist[i * k + m] = cand[m].first;
          t.idx[i * k + m] = cand[m].second;
        }
      }
    }
  });
  return t;
}

std::vector<double> pairwise_within(const PointCloud& cloud, std::span<const std::size_t> subset) {
  std::vector<std::size_t> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t m = 0; m < sorted.size(); ++m) {
    if (sorted[m] >= cloud.n()) {
      throw IndexError("subset index " + std::to_string(sorted[m]) + " out of range for N=" +
                           std::to_string(cloud.n()),
                       sorted[m]);
    }
    if (m > 0 && sorted[m] == sorted[m - 1]) {
      throw ParameterError("subset index " + std::to_string(sorted[m]) + " repeated");
    }
  }
  std::vector<double> out;
  out.reserve(subset.size() * (subset.size() - (subset.empty() ? 0 : 1)) / 2);
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      out.push_back(distance(cloud.row(subset[a]), cloud.row(subset[b])));
    }
  }
  return out;
}

std::vector<std::uint64_t> count_pairs_below(const PointCloud& cloud,
                                             std::span<const double> radii) {
  const std::size_t n = cloud.n();
  const std::size_t nr = radii.size();
  if (nr == 0 || n < 2) return std::vector<std::uint64_t>(nr, 0);
  const Screen screen = make_screen(cloud);
  std::vector<double> r2(nr);
  for (std::size_t m = 0; m < nr; ++m) r2[m] = radii[m] * radii[m];

  const std::size_t bs = block_rows(n);
  const std::size_t nblocks = (n + bs - 1) / bs;
  std::vector<std::uint64_t> per_block(nblocks * nr, 0);

  parallel_for_chunks(nblocks, 1, [&](std::size_t b0, std::size_t b1) {
    RowMatrix gram;
    for (std::size_t blk = b0; blk < b1; ++blk) {
      const std::size_t r0 = blk * bs;
      const std::size_t rows = std::min(bs, n - r0);
      const auto tail = static_cast<Eigen::Index>(n - r0);
      gram.noalias() = screen.centered.middleRows(static_cast<Eigen::Index>(r0),
                                                  static_cast<Eigen::Index>(rows)) *
                       screen.centered.bottomRows(tail).transpose();
      std::uint64_t* counts = per_block.data() + blk * nr;
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t i = r0 + r;
        const double qn = screen.sq_norms[static_cast<Eigen::Index>(i)];
        const double margin = 2.0 * screen.margin_factor * (qn + screen.max_sq_norm);
        for (std::size_t j = i + 1; j < n; ++j) {
          const double a = qn + screen.sq_norms[static_cast<Eigen::Index>(j)] -
                           2.0 * gram(static_cast<Eigen::Index>(r),
                                      static_cast<Eigen::Index>(j - r0));
          double exact = -1.0;
          for (std::size_t m = 0; m < nr; ++m) {
            if (a < r2[m] - margin) {
              ++counts[m];
            } else if (a <= r2[m] + margin) {
              if (exact < 0.0) exact = distance(cloud.row(i), cloud.row(j));
              if (exact < radii[m]) ++counts[m];
            }
          }
        }
      }
    }
  });

  std::vector<std::uint64_t> total(nr, 0);
  for (std::size_t blk = 0; blk < nblocks; ++blk) {
    for (std::size_t m = 0; m < nr; ++m) total[m] += per_block[blk * nr + m];
  }
  return total;
}

}  // namespace idlab
