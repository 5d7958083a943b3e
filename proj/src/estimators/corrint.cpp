#include <array>
#include <cmath>
#include <string>

#include "idlab/errors.hpp"
#include "idlab/estimators.hpp"

namespace idlab {

IdEstimate estimate_corrint(const PointCloud& cloud, std::size_t k1, std::size_t k2) {
  return estimate_corrint(NeighborContext(cloud, k2), k1, k2);
}

IdEstimate estimate_corrint(const NeighborContext& ctx, std::size_t k1, std::size_t k2) {
  if (k1 == 0 || k1 >= k2) throw ParameterError("corrint needs 0 < k1 < k2");
  ctx.require(k2, "corrint");
  const auto& t = ctx.table();
  const std::size_t n = t.n;

  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s1 += t.distances(i)[k1 - 1];
    s2 += t.distances(i)[k2 - 1];
  }
  const double r1 = s1 / static_cast<double>(n);
  const double r2 = s2 / static_cast<double>(n);
  if (r1 == r2) throw DegenerateError("corrint radii coincide (r1 == r2)");

  const std::array<double, 2> radii = {r1, r2};
  const auto counts = count_pairs_below(ctx.cloud(), radii);
  if (counts[0] == 0) throw DegenerateError("no pair closer than r1");
  if (counts[0] == counts[1]) throw DegenerateError("identical pair counts at r1 and r2");
  const double norm = 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
  const double c1 = norm * static_cast<double>(counts[0]);
  const double c2 = norm * static_cast<double>(counts[1]);

  IdEstimate e;
  e.value = (std::log(c2) - std::log(c1)) / (std::log(r2) - std::log(r1));
  e.n_used = n;
  e.estimator = make_spec("corrint", {{"k1", double(k1)}, {"k2", double(k2)}});
  e.diagnostics["r1"] = r1;
  e.diagnostics["r2"] = r2;
  e.diagnostics["c1"] = c1;
  e.diagnostics["c2"] = c2;
  e.diagnostics["n_duplicates"] = static_cast<double>(ctx.n_duplicates());
  return e;
}

}  // namespace idlab
