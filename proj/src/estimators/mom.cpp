#include <string>

#include "estimators/local_mean.hpp"
#include "idlab/errors.hpp"
#include "idlab/estimators.hpp"

namespace idlab {

std::optional<double> mom_local(std::span<const double> dists) {
  if (dists.empty()) return std::nullopt;
  const double w = dists.back();
  double sum = 0.0;
  for (double r : dists) sum += r;
  const double m1 = sum / static_cast<double>(dists.size());
  // F(r) = (r / w)^d gives E[r] = w d / (d + 1).
  if (!(w > m1)) return std::nullopt;
  return m1 / (w - m1);
}

IdEstimate estimate_mom(const PointCloud& cloud, std::size_t k) {
  return estimate_mom(NeighborContext(cloud, k), k);
}

IdEstimate estimate_mom(const NeighborContext& ctx, std::size_t k) {
  if (k < 2) throw ParameterError("mom needs k >= 2");
  ctx.require(k, "mom");
  const auto& t = ctx.table();
  const auto local = detail::mean_of_local(t.n, [&](std::size_t i) { return mom_local(t.distances(i).first(k)); });
  if (2 * local.valid < t.n) {
    throw QualityError("mom: r_k <= mean distance for " + std::to_string(t.n - local.valid) +
                       " of " + std::to_string(t.n) + " points");
  }

  IdEstimate e;
  e.value = local.mean;
  e.n_used = t.n;
  e.estimator = make_spec("mom", {{"k", double(k)}});
  e.diagnostics["valid_points"] = static_cast<double>(local.valid);
  e.diagnostics["n_duplicates"] = static_cast<double>(ctx.n_duplicates());
  return e;
}

}  // namespace idlab
