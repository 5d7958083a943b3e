#include <algorithm>
#include <cmath>
#include <string>

#include "idlab/errors.hpp"
#include "idlab/estimators.hpp"

namespace idlab {
namespace {

struct Range {
  double lo, hi;
  bool integer;
  bool lo_open = false;
};

Range param_range(const std::string& est, const std::string& key) {
  if (est == "pca" && key == "k") return {1.0, 1e12, false, true};
  if (est == "fishers") {
    if (key == "cond") return {1.0, 1e12, false, true};
    if (key == "alpha_min" || key == "alpha_max") return {0.0, 1.0, false, true};
    if (key == "alpha_step") return {0.0, 1.0, false, true};
  }
  if (est == "corrint" && (key == "k1" || key == "k2")) return {1.0, 1e9, true};
  if (est == "twonn" && key == "discard") return {0.0, 0.9, false};
  if (est == "ess" && key == "k") return {3.0, 1e6, true};
  if (est == "tle" && key == "k") return {5.0, 1e6, true};
  if (est == "mle" && key == "k") return {3.0, 1e6, true};
  if (est == "mom" && key == "k") return {2.0, 1e6, true};
  if (est == "mada" && key == "k") return {2.0, 1e6, true};
  throw ParameterError("estimator '" + est + "' has no parameter '" + key + "'");
}

std::size_t as_count(double v) { return static_cast<std::size_t>(std::llround(v)); }

}  // namespace

std::string_view to_string(Locality locality) {
  return locality == Locality::Global ? "global" : "local";
}

double EstimatorSpec::param(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw ParameterError("spec '" + name + "' lacks parameter '" + key + "'");
  return it->second;
}

const std::vector<EstimatorInfo>& estimator_registry() {
  static const std::vector<EstimatorInfo> registry = {
      {"pca", "projective", Locality::Global, false, {{"k", 20.0}}},
      {"fishers",
       "fine-grained clustering",
       Locality::Global,
       false,
       {{"cond", 10.0}, {"alpha_min", 0.6}, {"alpha_max", 0.98}, {"alpha_step", 0.02}}},
      {"corrint", "fractal", Locality::Global, true, {{"k1", 10.0}, {"k2", 20.0}}},
      {"twonn", "nn-based", Locality::Global, true, {{"discard", 0.1}}},
      {"ess", "nn-based", Locality::Local, true, {{"k", 10.0}}},
      {"tle", "nn-based", Locality::Local, true, {{"k", 20.0}}},
      {"mle", "nn-based", Locality::Local, true, {{"k", 20.0}}},
      {"mom", "nn-based", Locality::Local, true, {{"k", 100.0}}},
      {"mada", "nn-based", Locality::Local, true, {{"k", 20.0}}},
  };
  return registry;
}

const EstimatorInfo& estimator_info(std::string_view name) {
  const auto& reg = estimator_registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const auto& e) { return e.name == name; });
  if (it == reg.end()) throw RegistryError("unknown estimator '" + std::string(name) + "'");
  return *it;
}

void validate(const EstimatorSpec& spec) {
  const auto& info = estimator_info(spec.name);
  for (const auto& [key, _] : info.defaults) {
    if (!spec.params.contains(key)) {
      throw ParameterError("spec '" + spec.name + "' lacks parameter '" + key + "'");
    }
  }
  for (const auto& [key, value] : spec.params) {
    const Range r = param_range(spec.name, key);
    const bool below = r.lo_open ? value <= r.lo : value < r.lo;
    if (!std::isfinite(value) || below || value > r.hi) {
      throw ParameterError(spec.name + "." + key + "=" + std::to_string(value) + " out of range");
    }
    if (r.integer && value != std::floor(value)) {
      throw ParameterError(spec.name + "." + key + " must be an integer");
    }
  }
  if (spec.name == "corrint" && spec.param("k1") >= spec.param("k2")) {
    throw ParameterError("corrint needs k1 < k2");
  }
  if (spec.name == "fishers" && spec.param("alpha_min") > spec.param("alpha_max")) {
    throw ParameterError("fishers needs alpha_min <= alpha_max");
  }
}

EstimatorSpec make_spec(std::string_view name, const std::map<std::string, double>& overrides) {
  const auto& info = estimator_info(name);
  EstimatorSpec spec{info.name, info.defaults, info.locality};
  for (const auto& [key, value] : overrides) {
    if (!info.defaults.contains(key)) {
      throw ParameterError("estimator '" + info.name + "' has no parameter '" + key + "'");
    }
    spec.params[key] = value;
  }
  validate(spec);
  return spec;
}

std::size_t neighbors_required(const EstimatorSpec& spec) {
  const auto& n = spec.name;
  if (n == "pca" || n == "fishers") return 0;
  if (n == "corrint") return as_count(spec.param("k2"));
  if (n == "twonn") return 2;
  return as_count(spec.param("k"));
}

std::size_t min_points(const EstimatorSpec& spec) {
  const auto& n = spec.name;
  if (n == "pca") return 2;
  if (n == "fishers") return 50;
  if (n == "twonn") return 20;
  return neighbors_required(spec) + 1;
}

namespace {

std::vector<double> alpha_grid(const EstimatorSpec& spec) {
  const double lo = spec.param("alpha_min");
  const double hi = spec.param("alpha_max");
  const double step = spec.param("alpha_step");
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    // Round to 12 decimals so 0.6 + 19 * 0.02 lands on 0.98 exactly.
    const double a = std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12;
    if (a > hi + 1e-12) break;
    grid.push_back(a);
  }
  return grid;
}

IdEstimate with_spec(IdEstimate e, const EstimatorSpec& spec) {
  e.estimator = spec;
  return e;
}

}  // namespace

std::vector<double> default_alpha_grid() { return alpha_grid(make_spec("fishers")); }

IdEstimate estimate(const EstimatorSpec& spec, const PointCloud& cloud) {
  validate(spec);
  const std::size_t k = neighbors_required(spec);
  if (k == 0) {
    if (spec.name == "pca") return with_spec(estimate_pca(cloud, spec.param("k")), spec);
    return with_spec(estimate_fishers(cloud, spec.param("cond"), alpha_grid(spec)), spec);
  }
  const NeighborContext ctx(cloud, k);
  return estimate(spec, cloud, ctx);
}

IdEstimate estimate(const EstimatorSpec& spec, const PointCloud& cloud, const NeighborContext& ctx) {
  validate(spec);
  const auto& n = spec.name;
  if (n == "pca") return with_spec(estimate_pca(cloud, spec.param("k")), spec);
  if (n == "fishers") {
    return with_spec(estimate_fishers(cloud, spec.param("cond"), alpha_grid(spec)), spec);
  }
  if (n == "corrint") {
    return with_spec(
        estimate_corrint(ctx, as_count(spec.param("k1")), as_count(spec.param("k2"))), spec);
  }
  if (n == "twonn") return with_spec(estimate_twonn(ctx, spec.param("discard")), spec);
  const std::size_t k = as_count(spec.param("k"));
  if (n == "ess") return with_spec(estimate_ess(ctx, k), spec);
  if (n == "tle") return with_spec(estimate_tle(ctx, k), spec);
  if (n == "mle") return with_spec(estimate_mle(ctx, k), spec);
  if (n == "mom") return with_spec(estimate_mom(ctx, k), spec);
  if (n == "mada") return with_spec(estimate_mada(ctx, k), spec);
  throw RegistryError("unknown estimator '" + n + "'");
}

}  // namespace idlab
