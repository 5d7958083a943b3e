#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "estimators/local_mean.hpp"
#include "idlab/errors.hpp"
#include "idlab/estimators.hpp"

namespace idlab {

double ess_expected(double d) {
  if (d < 1.0) throw ParameterError("ess_expected needs d >= 1");
  if (d == 1.0) return 0.0;
  using boost::math::lgamma;
  // W_{d-1} / W_{d-2} with W_n = sqrt(pi) Gamma((n+1)/2) / Gamma(n/2 + 1).
  return std::exp(2.0 * lgamma(d / 2.0) - lgamma((d + 1.0) / 2.0) - lgamma((d - 1.0) / 2.0));
}

double ess_invert(double s, double d_max, bool* clamped) {
  if (clamped) *clamped = false;
  if (!(d_max >= 1.0)) throw ParameterError("ess_invert needs d_max >= 1");
  if (!(s < 1.0)) {
    throw InversionError("mean simplex skewness " + std::to_string(s) +
                         " is at or above the supremum 1");
  }
  if (s <= 0.0) return 1.0;
  if (s >= ess_expected(d_max)) {
    if (clamped) *clamped = true;
    return d_max;
  }
  double lo = 1.0, hi = d_max;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = ess_expected(mid);
    if (v == s) return mid;
    (v < s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<double> mean_pair_sine(std::span<const double> vectors, std::size_t count,
                                     std::size_t dim) {
  std::vector<double> sq(count);
  for (std::size_t a = 0; a < count; ++a) {
    double s = 0.0;
    for (std::size_t c = 0; c < dim; ++c) s += vectors[a * dim + c] * vectors[a * dim + c];
    sq[a] = s;
  }
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < count; ++a) {
    if (sq[a] == 0.0) continue;
    for (std::size_t b = a + 1; b < count; ++b) {
      if (sq[b] == 0.0) continue;
      double dot = 0.0;
      for (std::size_t c = 0; c < dim; ++c) dot += vectors[a * dim + c] * vectors[b * dim + c];
      const double cos2 = std::min(1.0, dot * dot / (sq[a] * sq[b]));
      total += std::sqrt(1.0 - cos2);
      ++pairs;
    }
  }
  if (pairs == 0) return std::nullopt;
  return total / static_cast<double>(pairs);
}

std::optional<double> local_skewness(std::span<const double> vectors, std::size_t count,
                                     std::size_t dim) {
  std::vector<double> centered(vectors.begin(), vectors.begin() + static_cast<std::ptrdiff_t>(count * dim));
  for (std::size_t c = 0; c < dim; ++c) {
    double m = 0.0;
    for (std::size_t a = 0; a < count; ++a) m += centered[a * dim + c];
    m /= static_cast<double>(count);
    for (std::size_t a = 0; a < count; ++a) centered[a * dim + c] -= m;
  }
  return mean_pair_sine(centered, count, dim);
}

IdEstimate estimate_ess(const PointCloud& cloud, std::size_t k) {
  return estimate_ess(NeighborContext(cloud, k), k);
}

IdEstimate estimate_ess(const NeighborContext& ctx, std::size_t k) {
  if (k < 3) throw ParameterError("ess needs k >= 3");
  ctx.require(k, "ess");
  const auto& cloud = ctx.cloud();
  const auto& t = ctx.table();
  const std::size_t dim = cloud.d();

  const auto local = detail::mean_of_local(t.n, [&](std::size_t i) {
    std::vector<double> block(k * dim);
    const auto idx = t.indices(i);
    for (std::size_t a = 0; a < k; ++a) {
      const auto r = cloud.row(idx[a]);
      std::copy(r.begin(), r.end(), block.begin() + static_cast<std::ptrdiff_t>(a * dim));
    }
    return local_skewness(block, k, dim);
  });
  if (local.valid == 0) throw DegenerateError("no neighborhood has a usable pair of vectors");

  bool clamped = false;
  IdEstimate e;
  e.value = ess_invert(local.mean, static_cast<double>(dim), &clamped);
  e.n_used = t.n;
  e.estimator = make_spec("ess", {{"k", double(k)}});
  e.diagnostics["mean_skewness"] = local.mean;
  e.diagnostics["valid_points"] = static_cast<double>(local.valid);
  e.diagnostics["clamped"] = clamped ? 1.0 : 0.0;
  e.diagnostics["n_duplicates"] = static_cast<double>(ctx.n_duplicates());
  return e;
}

}  // namespace idlab
