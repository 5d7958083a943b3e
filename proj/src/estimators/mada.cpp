#include <cmath>
#include <numbers>
#include <string>

#include "estimators/local_mean.hpp"
#include "idlab/errors.hpp"
#include "idlab/estimators.hpp"

namespace idlab {

std::optional<double> mada_local(std::span<const double> dists) {
  const std::size_t k = dists.size();
  if (k < 2) return std::nullopt;
  const double far = dists[k - 1];
  const double half = dists[(k + 1) / 2 - 1];
  if (!(half > 0.0) || !(far > half)) return std::nullopt;
  return std::numbers::ln2 / std::log(far / half);
}

IdEstimate estimate_mada(const PointCloud& cloud, std::size_t k) {
  return estimate_mada(NeighborContext(cloud, k), k);
}

IdEstimate estimate_mada(const NeighborContext& ctx, std::size_t k) {
  if (k < 2) throw ParameterError("mada needs k >= 2");
  ctx.require(k, "mada");
  const auto& t = ctx.table();
  const auto local = detail::mean_of_local(t.n, [&](std::size_t i) { return mada_local(t.distances(i).first(k)); });
  if (local.valid == 0) throw DegenerateError("mada: r_k equals r_ceil(k/2) at every point");

  IdEstimate e;
  e.value = local.mean;
  e.n_used = t.n;
  e.estimator = make_spec("mada", {{"k", double(k)}});
  e.diagnostics["valid_points"] = static_cast<double>(local.valid);
  e.diagnostics["n_duplicates"] = static_cast<double>(ctx.n_duplicates());
  return e;
}

}  // namespace idlab
