#include "idlab/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "idlab/errors.hpp"
#include "idlab/estimators.hpp"
#include "idlab/manifolds.hpp"

namespace idlab {

namespace {

const std::vector<std::string> kNnEstimators{"twonn", "mle", "mom", "mada", "tle", "corrint", "ess"};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

BenchCell run_cell(const std::string& family, std::size_t d, const EstimatorSpec& spec,
                   const PointCloud& cloud, const NeighborContext* ctx) {
  BenchCell c;
  c.family = family;
  c.d = d;
  c.estimator = spec.name;
  c.truth = static_cast<double>(d);
  c.tolerance = bench_tolerance(spec.name, d);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.value = ctx ? estimate(spec, cloud, *ctx).value : estimate(spec, cloud).value;
    c.pass = std::abs(c.value - c.truth) <= c.tolerance;
  } catch (const Error& e) {
    c.value = std::nan("");
    c.error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  c.seconds = seconds_since(t0);
  return c;
}

}  // namespace

double bench_tolerance(const std::string& estimator, std::size_t d) {
  if (estimator == "pca") return 0.0;
  if (estimator == "fishers") return 1.5;
  return std::max(1.0, 0.2 * static_cast<double>(d));
}

std::vector<BenchCell> run_bench(const BenchOptions& o) {
  std::vector<BenchCell> cells;
  std::uint64_t stream = 0;
  auto next_seed = [&] { return o.seed + 1000 * (++stream); };

  std::vector<EstimatorSpec> nn;
  std::size_t k_max = 0;
  for (const auto& name : kNnEstimators) {
    nn.push_back(make_spec(name));
    k_max = std::max(k_max, neighbors_required(nn.back()));
  }

  for (auto family : {ManifoldFamily::UniformBall, ManifoldFamily::UniformCube}) {
    for (std::size_t d : o.nn_dims) {
      const auto g = generate({family, d, o.ambient, o.n, 0.0, next_seed()});
      const NeighborContext ctx(g.cloud, k_max);
      for (const auto& spec : nn) {
        cells.push_back(run_cell(std::string(to_string(family)), d, spec, g.cloud, &ctx));
      }
    }
  }

  const auto pca = make_spec("pca");
  for (std::size_t d = 1; d <= o.pca_max_dim; ++d) {
    const auto g = generate({ManifoldFamily::LinearSubspace, d, o.ambient, o.n, 0.0, next_seed()});
    cells.push_back(run_cell("linear_subspace", d, pca, g.cloud, nullptr));
  }

  const auto fishers = make_spec("fishers");
  for (std::size_t d = 1; d <= o.fishers_max_dim; ++d) {
    const std::size_t ambient = std::max(o.ambient, d + 1);
    const auto g = generate({ManifoldFamily::SphereSurface, d, ambient, o.n, 0.0, next_seed()});
    cells.push_back(run_cell("sphere_surface", d, fishers, g.cloud, nullptr));
  }
  return cells;
}

}  // namespace idlab
