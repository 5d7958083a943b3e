#include <cmath>
#include <string>

#include "estimators/local_mean.hpp"
#include "idlab/errors.hpp"
#include "idlab/estimators.hpp"

namespace idlab {

double mle_local(std::span<const double> dists) {
  const std::size_t k = dists.size();
  if (k < 2) throw ParameterError("mle_local needs at least 2 distances");
  const double rk = dists[k - 1];
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < k; ++j) {
    if (dists[j] == 0.0) throw DegenerateError("zero neighbor distance in mle");
    sum += std::log(rk / dists[j]);
  }
  if (!(sum > 0.0)) throw DegenerateError("mle: all k neighbor distances coincide");
  return static_cast<double>(k - 1) / sum;
}

IdEstimate estimate_mle(const PointCloud& cloud, std::size_t k) {
  return estimate_mle(NeighborContext(cloud, k), k);
}

IdEstimate estimate_mle(const NeighborContext& ctx, std::size_t k) {
  if (k < 3) throw ParameterError("mle needs k >= 3");
  ctx.require(k, "mle");
  const auto& t = ctx.table();
  const auto local = detail::mean_of_local(
      t.n, [&](std::size_t i) -> std::optional<double> { return mle_local(t.distances(i).first(k)); });

  IdEstimate e;
  e.value = local.mean;
  e.n_used = t.n;
  e.estimator = make_spec("mle", {{"k", double(k)}});
  e.diagnostics["n_duplicates"] = static_cast<double>(ctx.n_duplicates());
  return e;
}

}  // namespace idlab
