#include "idlab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

#include "idlab/errors.hpp"
#include "rng.hpp"

namespace idlab {

std::size_t IdProfile::missing_count() const {
  return static_cast<std::size_t>(
      std::count_if(per_layer.begin(), per_layer.end(), [](const auto& e) { return !e; }));
}

std::vector<double> IdProfile::values() const {
  std::vector<double> out;
  for (const auto& e : per_layer) {
    if (e) out.push_back(e->value);
  }
  return out;
}

IdProfile profile(const LayerStack& stack, const EstimatorSpec& spec, const std::string& dataset_id,
                  const std::string& model_id) {
  validate(spec);
  IdProfile out;
  out.estimator = spec;
  out.dataset_id = dataset_id;
  out.model_id = model_id;
  out.d_ambient = stack.d();
  for (std::size_t j = 0; j < stack.layer_count(); ++j) {
    try {
      IdEstimate e = estimate(spec, stack.layer(j));
      if (!std::isfinite(e.value)) throw DegenerateError("non-finite estimate");
      out.per_layer.emplace_back(std::move(e));
      out.errors.emplace_back();
    } catch (const Error& err) {
      out.per_layer.emplace_back(std::nullopt);
      out.errors.push_back(std::string(to_string(err.kind())) + ": " + err.what());
    }
  }
  const double missing = static_cast<double>(out.missing_count());
  if (missing > kMaxMissingFraction * static_cast<double>(stack.layer_count())) {
    std::size_t first_bad = 0;
    while (out.per_layer[first_bad]) ++first_bad;
    throw QualityError(std::to_string(out.missing_count()) + " of " +
                           std::to_string(stack.layer_count()) + " layers failed; first: " +
                           out.errors[first_bad],
                       first_bad);
  }
  return out;
}

ProfileAggregate aggregate(const std::vector<double>& values) {
  if (values.empty()) throw EmptyError("cannot aggregate an empty profile");
  ProfileAggregate a;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  a.min = *lo;
  a.max = *hi;
  a.first = values.front();
  a.last = values.back();
  a.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  // Summation rounding can push the mean a hair outside [min, max].
  a.mean = std::clamp(a.mean, a.min, a.max);
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  a.median = sorted[(sorted.size() - 1) / 2];
  a.change = a.last - a.first;
  a.range = a.max - a.min;
  return a;
}

ProfileAggregate aggregate(const IdProfile& profile) { return aggregate(profile.values()); }

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t size, std::uint64_t seed) {
  if (size > n) {
    throw ParameterError("subsample size " + std::to_string(size) + " exceeds N=" +
                         std::to_string(n));
  }
  std::vector<std::size_t> out;
  if (size == n) {
    out.resize(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  std::mt19937_64 rng(detail::stream_seed(seed, size));
  out.reserve(size);
  if (2 * size >= n) {
    // Partial Fisher-Yates is cheaper when most of the points are kept.
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < size; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    out.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
  } else {
    // Floyd's algorithm.
    std::unordered_set<std::size_t> seen;
    seen.reserve(size * 2);
    for (std::size_t j = n - size; j < n; ++j) {
      std::uniform_int_distribution<std::size_t> pick(0, j);
      const std::size_t t = pick(rng);
      out.push_back(seen.insert(t).second ? t : (seen.insert(j), j));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void check_convergence_args(const PointCloud& cloud, std::vector<std::size_t>& sizes,
                            const std::vector<std::uint64_t>& seeds) {
  if (seeds.size() < 2) throw ParameterError("convergence needs at least two seeds");
  if (sizes.empty()) throw ParameterError("convergence needs at least one size");
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.back() > cloud.n()) {
    throw ParameterError("subsample size " + std::to_string(sizes.back()) + " exceeds N=" +
                         std::to_string(cloud.n()));
  }
}

void push_stats(ConvergenceCurve& curve, std::size_t size, const std::vector<double>& vals) {
  const double n = static_cast<double>(vals.size());
  const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  curve.sizes.push_back(size);
  curve.mean_id.push_back(mean);
  curve.std_id.push_back(vals.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0);
}

}  // namespace

std::vector<ConvergenceCurve> convergence_multi(const PointCloud& cloud,
                                                const std::vector<EstimatorSpec>& specs,
                                                std::vector<std::size_t> sizes,
                                                const std::vector<std::uint64_t>& seeds) {
  if (specs.empty()) throw ParameterError("convergence needs at least one estimator");
  check_convergence_args(cloud, sizes, seeds);
  for (const auto& s : specs) validate(s);

  std::vector<ConvergenceCurve> curves(specs.size());
  for (std::size_t e = 0; e < specs.size(); ++e) {
    curves[e].estimator = specs[e];
    curves[e].seeds = seeds;
  }

  for (std::size_t size : sizes) {
    std::vector<bool> active(specs.size());
    std::size_t k_max = 0;
    for (std::size_t e = 0; e < specs.size(); ++e) {
      active[e] = size >= min_points(specs[e]);
      if (!active[e]) {
        curves[e].warnings.push_back("size " + std::to_string(size) + " below minimum " +
                                     std::to_string(min_points(specs[e])) + " for " +
                                     specs[e].name + "; skipped");
      } else {
        k_max = std::max(k_max, neighbors_required(specs[e]));
      }
    }
    if (std::none_of(active.begin(), active.end(), [](bool b) { return b; })) continue;

    std::vector<std::vector<double>> vals(specs.size());
    // A full-size subsample is the identity for every seed: evaluate once.
    const bool full = size == cloud.n();
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const std::uint64_t seed = seeds[si];
      if (full && si > 0) {
        for (auto& v : vals) {
          if (!v.empty()) v.push_back(v.front());
        }
        continue;
      }
      const PointCloud sub = cloud.select_rows(subsample_indices(cloud.n(), size, seed));
      std::optional<NeighborContext> ctx;
      if (k_max > 0) {
        try {
          ctx.emplace(sub, k_max);
        } catch (const Error& err) {
          for (std::size_t e = 0; e < specs.size(); ++e) {
            if (active[e] && neighbors_required(specs[e]) > 0) {
              curves[e].warnings.push_back("size " + std::to_string(size) + " seed " +
                                           std::to_string(seed) + ": " + err.what());
            }
          }
        }
      }
      for (std::size_t e = 0; e < specs.size(); ++e) {
        if (!active[e]) continue;
        const bool nn = neighbors_required(specs[e]) > 0;
        if (nn && !ctx) continue;
        try {
          const IdEstimate est = nn ? estimate(specs[e], sub, *ctx) : estimate(specs[e], sub);
          if (std::isfinite(est.value)) vals[e].push_back(est.value);
        } catch (const Error& err) {
          curves[e].warnings.push_back("size " + std::to_string(size) + " seed " +
                                       std::to_string(seed) + ": " + err.what());
        }
      }
    }
    for (std::size_t e = 0; e < specs.size(); ++e) {
      if (!active[e]) continue;
      if (vals[e].empty()) {
        curves[e].warnings.push_back("size " + std::to_string(size) +
                                     " produced no estimate; skipped");
        continue;
      }
      push_stats(curves[e], size, vals[e]);
    }
  }
  return curves;
}

ConvergenceCurve convergence(const PointCloud& cloud, const EstimatorSpec& spec,
                             std::vector<std::size_t> sizes,
                             const std::vector<std::uint64_t>& seeds) {
  return std::move(convergence_multi(cloud, {spec}, std::move(sizes), seeds).front());
}

std::vector<std::size_t> log_spaced_sizes(std::size_t lo, std::size_t hi, std::size_t count) {
  if (lo == 0 || hi < lo || count == 0) throw ParameterError("bad log-spaced size range");
  std::vector<std::size_t> out;
  if (count == 1) return {hi};
  const double a = std::log(static_cast<double>(lo));
  const double b = std::log(static_cast<double>(hi));
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(static_cast<std::size_t>(std::llround(std::exp(a + t * (b - a)))));
  }
  out.front() = lo;
  out.back() = hi;
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string to_string(Admission::Kind kind) {
  switch (kind) {
    case Admission::Kind::Reject: return "reject";
    case Admission::Kind::UseAll: return "use_all";
    case Admission::Kind::Subsample: return "subsample";
  }
  return "unknown";
}

Admission admit_dataset(std::size_t n, std::size_t threshold, std::size_t cap, std::uint64_t seed,
                        bool with_indices) {
  if (cap < threshold) throw ParameterError("cap must be at least the threshold");
  Admission a;
  if (n < threshold) return a;
  if (n <= cap) {
    a.kind = Admission::Kind::UseAll;
    a.n_used = n;
    return a;
  }
  a.kind = Admission::Kind::Subsample;
  a.n_used = cap;
  if (with_indices) a.indices = subsample_indices(n, cap, seed);
  return a;
}

}  // namespace idlab
