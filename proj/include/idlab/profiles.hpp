#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "idlab/estimators.hpp"
#include "idlab/point_cloud.hpp"

namespace idlab {

/// Per-layer ID estimates for one (dataset, model, estimator) triple. A layer
/// whose estimator failed is left empty and its error kept in `errors`.
struct IdProfile {
  EstimatorSpec estimator;
  std::vector<std::optional<IdEstimate>> per_layer;
  std::vector<std::string> errors;  // parallel to per_layer, empty when present
  std::string dataset_id;
  std::string model_id;
  std::size_t d_ambient = 0;

  std::size_t missing_count() const;
  /// Values of the present layers in layer order.
  std::vector<double> values() const;
};

struct ProfileAggregate {
  double max = 0.0;
  double min = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double first = 0.0;
  double last = 0.0;
  double change = 0.0;
  double range = 0.0;
};

/// Largest tolerated fraction of failed layers.
inline constexpr double kMaxMissingFraction = 0.25;

/// Runs the estimator on every layer. Throws QualityError when more than a
/// quarter of the layers fail.
IdProfile profile(const LayerStack& stack, const EstimatorSpec& spec,
                  const std::string& dataset_id = "", const std::string& model_id = "");

/// Eight aggregates over the values in order. Even-length medians take the
/// lower middle. Throws EmptyError on an empty list.
ProfileAggregate aggregate(const std::vector<double>& values);

/// Aggregates over the present layers. Throws EmptyError when none are.
ProfileAggregate aggregate(const IdProfile& profile);

struct ConvergenceCurve {
  EstimatorSpec estimator;
  std::vector<std::size_t> sizes;
  std::vector<double> mean_id;
  std::vector<double> std_id;  // sample standard deviation over seeds
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> warnings;
};

/// Sorted indices of a uniform subsample without replacement, determined by
/// (seed, size) alone.
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t size, std::uint64_t seed);

/// Estimates on subsamples of each size for each seed. Sizes are sorted and
/// deduplicated; sizes below the estimator's minimum are skipped with a
/// warning. Throws ParameterError when a size exceeds N or fewer than two
/// seeds are given.
ConvergenceCurve convergence(const PointCloud& cloud, const EstimatorSpec& spec,
                             std::vector<std::size_t> sizes, const std::vector<std::uint64_t>& seeds);

/// Same as convergence() for several estimators, sharing one neighbor table
/// per (size, seed) cell.
std::vector<ConvergenceCurve> convergence_multi(const PointCloud& cloud,
                                                const std::vector<EstimatorSpec>& specs,
                                                std::vector<std::size_t> sizes,
                                                const std::vector<std::uint64_t>& seeds);

/// `sizes` log-spaced from lo to hi inclusive, rounded and deduplicated.
std::vector<std::size_t> log_spaced_sizes(std::size_t lo, std::size_t hi, std::size_t count);

struct Admission {
  enum class Kind { Reject, UseAll, Subsample };
  Kind kind = Kind::Reject;
  std::size_t n_used = 0;
  std::vector<std::size_t> indices;  // only for Subsample, sorted
};

std::string to_string(Admission::Kind kind);

/// Rejects n < threshold, keeps everything up to cap, else subsamples to cap.
Admission admit_dataset(std::size_t n, std::size_t threshold = 10000, std::size_t cap = 50000,
                        std::uint64_t seed = 42, bool with_indices = false);

}  // namespace idlab
