#include <cmath>
#include <string>
#include <vector>

#include "estimators/local_mean.hpp"
#include "idlab/errors.hpp"
#include "idlab/estimators.hpp"

namespace idlab {
namespace {

// Distance from neighbor v to a point at squared distance dj2 from the query
// and w2 from v, rescaled so the ball B(query, r) boundary along the ray from
// v sits at r. di2 is |v - query|^2. Written in the form without
// cancellation for both signs of b.
double boundary_scaled(double di2, double dj2, double w2, double r) {
  const double b = di2 + w2 - dj2;
  const double slack = std::max(0.0, r * r - di2);
  const double disc = std::max(0.0, b * b + 4.0 * w2 * slack);
  if (b > 0.0) return 2.0 * r * w2 / (b + std::sqrt(disc));
  if (slack == 0.0) return 0.0;
  return r * (std::sqrt(disc) - b) / (2.0 * slack);
}

}  // namespace

std::optional<double> pooled_log_mle(std::span<const double> samples, double r) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : samples) {
    if (!(x > 0.0) || !std::isfinite(x)) continue;
    sum += std::log(x / r);
    ++n;
  }
  if (n == 0 || !(sum < 0.0)) return std::nullopt;
  return -static_cast<double>(n) / sum;
}

std::optional<double> tle_local(std::span<const double> neighbors, std::span<const double> dists,
                                std::size_t dim) {
  const std::size_t k = dists.size();
  const double r = dists[k - 1];
  if (!(r > 0.0)) return std::nullopt;

  std::vector<double> samples;
  samples.reserve(2 * k * k);
  for (std::size_t i = 0; i < k; ++i) {
    // The query-centred distance enters once for each of the two families.
    samples.push_back(dists[i]);
    samples.push_back(dists[i]);
  }
  for (std::size_t i = 0; i < k; ++i) {
    const double di2 = dists[i] * dists[i];
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double dj2 = dists[j] * dists[j];
      double w2 = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double diff = neighbors[i * dim + c] - neighbors[j * dim + c];
        w2 += diff * diff;
      }
      if (w2 == 0.0) continue;  // coincident neighbors carry no measurement
      // Second family: v_j reflected through the query.
      const double z2 = 2.0 * di2 + 2.0 * dj2 - w2;
      samples.push_back(boundary_scaled(di2, dj2, w2, r));
      if (z2 > 0.0) samples.push_back(boundary_scaled(di2, dj2, z2, r));
    }
  }
  return pooled_log_mle(samples, r);
}

IdEstimate estimate_tle(const PointCloud& cloud, std::size_t k) {
  return estimate_tle(NeighborContext(cloud, k), k);
}

IdEstimate estimate_tle(const NeighborContext& ctx, std::size_t k) {
  if (k < 5) throw ParameterError("tle needs k >= 5");
  ctx.require(k, "tle");
  const auto& cloud = ctx.cloud();
  const auto& t = ctx.table();
  const std::size_t dim = cloud.d();

  const auto local = detail::mean_of_local(t.n, [&](std::size_t i) -> std::optional<double> {
    std::vector<double> block(k * dim);
    const auto idx = t.indices(i);
    for (std::size_t a = 0; a < k; ++a) {
      const auto row = cloud.row(idx[a]);
      std::copy(row.begin(), row.end(), block.begin() + static_cast<std::ptrdiff_t>(a * dim));
    }
    const auto d = tle_local(block, t.distances(i).first(k), dim);
    if (d && *d > 0.0) return d;
    return std::nullopt;
  });
  if (2 * local.valid < t.n) {
    throw QualityError("tle: only " + std::to_string(local.valid) + " of " + std::to_string(t.n) +
                       " neighborhoods gave a valid estimate");
  }

  IdEstimate e;
  e.value = local.mean;
  e.n_used = t.n;
  e.estimator = make_spec("tle", {{"k", double(k)}});
  e.diagnostics["valid_points"] = static_cast<double>(local.valid);
  e.diagnostics["n_duplicates"] = static_cast<double>(ctx.n_duplicates());
  return e;
}

}  // namespace idlab
