#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idlab/neighbors.hpp"
#include "idlab/point_cloud.hpp"

namespace idlab {

enum class Locality { Global, Local };

std::string_view to_string(Locality locality);

/// Named estimator plus its hyperparameters. Build with make_spec() so
/// defaults are filled in and values range-checked.
struct EstimatorSpec {
  std::string name;
  std::map<std::string, double> params;
  Locality locality = Locality::Global;

  double param(const std::string& key) const;

  friend bool operator==(const EstimatorSpec&, const EstimatorSpec&) = default;
};

/// Real-valued intrinsic dimension with bookkeeping. n_used counts the points
/// the estimator actually saw (after duplicate removal for NN estimators).
struct IdEstimate {
  double value = 0.0;
  std::size_t n_used = 0;
  EstimatorSpec estimator;
  std::map<std::string, double> diagnostics;
};

struct EstimatorInfo {
  std::string name;
  std::string method;
  Locality locality;
  bool neighbor_based;
  std::map<std::string, double> defaults;
};

/// The nine estimators, in display order.
const std::vector<EstimatorInfo>& estimator_registry();

/// Throws RegistryError for unknown names.
const EstimatorInfo& estimator_info(std::string_view name);

/// Fills defaults, applies overrides and validates ranges. Throws
/// RegistryError for an unknown estimator and ParameterError for an unknown
/// or out-of-range parameter.
EstimatorSpec make_spec(std::string_view name, const std::map<std::string, double>& overrides = {});

void validate(const EstimatorSpec& spec);

/// Neighbor count the estimator reads from a NeighborContext (0 for PCA and
/// FisherS).
std::size_t neighbors_required(const EstimatorSpec& spec);

/// Smallest N for which the estimator's preconditions hold.
std::size_t min_points(const EstimatorSpec& spec);

/// Indices of the first occurrence of every distinct row, ascending.
std::vector<std::size_t> unique_row_indices(const PointCloud& cloud);

/// Duplicate-free copy of a cloud together with an exact k-NN table. Built
/// once and shared by every NN-based estimator run on the same cloud.
class NeighborContext {
 public:
  NeighborContext(const PointCloud& cloud, std::size_t k_max);

  const PointCloud& cloud() const noexcept { return cloud_; }
  const NeighborTable& table() const noexcept { return table_; }
  std::size_t n_input() const noexcept { return n_input_; }
  std::size_t n_duplicates() const noexcept { return n_input_ - cloud_.n(); }

  /// Throws SampleError if the table has fewer than k columns.
  void require(std::size_t k, std::string_view who) const;

 private:
  PointCloud cloud_;
  NeighborTable table_;
  std::size_t n_input_;
};

std::vector<double> default_alpha_grid();

// Global estimators.
IdEstimate estimate_pca(const PointCloud& cloud, double k = 20.0);
IdEstimate estimate_fishers(const PointCloud& cloud, double cond = 10.0,
                            const std::vector<double>& alphas = default_alpha_grid());
IdEstimate estimate_corrint(const PointCloud& cloud, std::size_t k1 = 10, std::size_t k2 = 20);
IdEstimate estimate_corrint(const NeighborContext& ctx, std::size_t k1 = 10, std::size_t k2 = 20);
IdEstimate estimate_twonn(const PointCloud& cloud, double discard = 0.1);
IdEstimate estimate_twonn(const NeighborContext& ctx, double discard = 0.1);

// Local estimators; the global value is the mean of valid point estimates
// taken in index order.
IdEstimate estimate_ess(const PointCloud& cloud, std::size_t k = 10);
IdEstimate estimate_ess(const NeighborContext& ctx, std::size_t k = 10);
IdEstimate estimate_tle(const PointCloud& cloud, std::size_t k = 20);
IdEstimate estimate_tle(const NeighborContext& ctx, std::size_t k = 20);
IdEstimate estimate_mle(const PointCloud& cloud, std::size_t k = 20);
IdEstimate estimate_mle(const NeighborContext& ctx, std::size_t k = 20);
IdEstimate estimate_mom(const PointCloud& cloud, std::size_t k = 100);
IdEstimate estimate_mom(const NeighborContext& ctx, std::size_t k = 100);
IdEstimate estimate_mada(const PointCloud& cloud, std::size_t k = 20);
IdEstimate estimate_mada(const NeighborContext& ctx, std::size_t k = 20);

/// Dispatch by name. NN-based estimators deduplicate first.
IdEstimate estimate(const EstimatorSpec& spec, const PointCloud& cloud);

/// Dispatch reusing a context built from `cloud` (PCA and FisherS read
/// `cloud`, the rest read the context).
IdEstimate estimate(const EstimatorSpec& spec, const PointCloud& cloud, const NeighborContext& ctx);

// Building blocks, exposed for reuse and direct testing.

struct TwoNNFit {
  double slope = 0.0;
  double r_squared = 0.0;
  std::size_t n_fit = 0;
};

/// Least-squares fit through the origin of -ln(1 - F) against ln(mu) on the
/// sorted ratios, with the largest `discard` fraction dropped.
TwoNNFit twonn_fit(std::vector<double> mu, double discard);

/// E|sin(theta)| between independent uniform directions in R^d, continuous in
/// d >= 1 (0 at d = 1).
double ess_expected(double d);

/// Solves ess_expected(d) = s on [1, d_max] by bisection. Returns d_max when
/// s is at or above ess_expected(d_max); throws InversionError when s >= 1.
double ess_invert(double s, double d_max, bool* clamped = nullptr);

/// Mean |sin| over pairs of the given vectors (rows of a count x dim block),
/// skipping zero-length vectors. nullopt when no pair is usable.
std::optional<double> mean_pair_sine(std::span<const double> vectors, std::size_t count,
                                     std::size_t dim);

/// Centers the vectors on their centroid, then mean_pair_sine.
std::optional<double> local_skewness(std::span<const double> vectors, std::size_t count,
                                     std::size_t dim);

/// Pooled MLE over normalized distance samples x in (0, r]:
/// -n / sum ln(x / r). nullopt when the sum is not negative.
std::optional<double> pooled_log_mle(std::span<const double> samples, double r);

/// Tight-locality estimate at one query. `neighbors` holds the k neighbor
/// coordinates (k x dim, row-major) and `dists` their sorted distances to the
/// query.
std::optional<double> tle_local(std::span<const double> neighbors, std::span<const double> dists,
                                std::size_t dim);

/// Levina-Bickel local estimate from k sorted neighbor distances. Throws
/// DegenerateError on a zero distance or when all distances coincide.
double mle_local(std::span<const double> dists);

/// Method-of-moments local estimate; nullopt when r_k <= mean distance.
std::optional<double> mom_local(std::span<const double> dists);

/// ln 2 / ln(r_k / r_ceil(k/2)); nullopt when the ratio is not above 1.
std::optional<double> mada_local(std::span<const double> dists);

}  // namespace idlab
