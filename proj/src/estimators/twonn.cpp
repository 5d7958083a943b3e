#include <algorithm>
#include <cmath>
#include <string>

#include "idlab/errors.hpp"
#include "idlab/estimators.hpp"

namespace idlab {

TwoNNFit twonn_fit(std::vector<double> mu, double discard) {
  if (!(discard >= 0.0 && discard < 1.0)) throw ParameterError("twonn discard must be in [0, 1)");
  std::sort(mu.begin(), mu.end());
  const std::size_t n = mu.size();
  // F(mu_(n)) = 1 has no finite ordinate, so at most n - 1 points enter.
  const auto kept = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - discard)));
  const std::size_t n_fit = std::min(kept, n == 0 ? 0 : n - 1);
  if (n_fit < 10) {
    throw SampleError("twonn regression needs at least 10 points after discarding, got " +
                      std::to_string(n_fit));
  }
  std::vector<double> xs(n_fit), ys(n_fit);
  double sxx = 0.0, sxy = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n_fit; ++i) {
    xs[i] = std::log(mu[i]);
    ys[i] = -std::log1p(-static_cast<double>(i + 1) / static_cast<double>(n));
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    sy += ys[i];
  }
  if (!(sxx > 0.0)) throw DegenerateError("all neighbor ratios equal 1");
  TwoNNFit fit;
  fit.slope = sxy / sxx;
  fit.n_fit = n_fit;
  const double ybar = sy / static_cast<double>(n_fit);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n_fit; ++i) {
    const double r = ys[i] - fit.slope * xs[i];
    ss_res += r * r;
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

IdEstimate estimate_twonn(const PointCloud& cloud, double discard) {
  return estimate_twonn(NeighborContext(cloud, 2), discard);
}

IdEstimate estimate_twonn(const NeighborContext& ctx, double discard) {
  if (ctx.cloud().n() < 20) throw SampleError("twonn needs at least 20 distinct points");
  ctx.require(2, "twonn");
  const auto& t = ctx.table();
  std::vector<double> mu(t.n);
  for (std::size_t i = 0; i < t.n; ++i) {
    const auto d = t.distances(i);
    if (d[0] == 0.0) throw DegenerateError("zero first-neighbor distance at point " + std::to_string(i), i);
    mu[i] = d[1] / d[0];
  }
  const TwoNNFit fit = twonn_fit(std::move(mu), discard);

  IdEstimate e;
  e.value = fit.slope;
  e.n_used = t.n;
  e.estimator = make_spec("twonn", {{"discard", discard}});
  e.diagnostics["r_squared"] = fit.r_squared;
  e.diagnostics["n_fit"] = static_cast<double>(fit.n_fit);
  e.diagnostics["n_duplicates"] = static_cast<double>(ctx.n_duplicates());
  return e;
}

}  // namespace idlab
