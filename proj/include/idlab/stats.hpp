#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace idlab {

struct CorrelationReport {
  double rho = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::string p_method;  // "exact" or "t"
  std::optional<double> significant_at;
};

/// Sample size at or below which p comes from full permutation enumeration.
inline constexpr std::size_t kExactPermutationMaxN = 8;

/// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& x);

/// Two-sided p of rho under H0 from Student-t with n - 2 degrees of freedom.
double t_approx_p(double rho, std::size_t n);

/// Two-sided p: share of the n! orderings of ry whose |rho| reaches the
/// observed one. Expects average ranks.
double exact_permutation_p(const std::vector<double>& rx, const std::vector<double>& ry);

/// Spearman rho of the pairs where both values are finite (NaN marks
/// missing). Throws SampleError for fewer than 3 pairs, DegenerateError when
/// either side is constant, ParameterError on unequal lengths.
CorrelationReport spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Rows are datasets, columns named metrics; NaN marks a missing cell.
struct MetricTable {
  std::vector<std::string> row_ids;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> cells;  // [row][column]

  /// Throws SchemaError on duplicate column names or ragged rows.
  void validate() const;
  /// Index of a column, or nullopt.
  std::optional<std::size_t> column_index(const std::string& name) const;
  std::vector<double> column(std::size_t j) const;
};

/// CSV with header "dataset_id,<metric>,..."; empty, NA and nan cells are missing.
MetricTable load_metric_table(const std::filesystem::path& path);
void save_metric_table(const std::filesystem::path& path, const MetricTable& table);

struct CorrelationMatrix {
  std::vector<std::string> columns;
  double alpha = 0.1;
  std::vector<std::vector<std::optional<CorrelationReport>>> cells;
  std::vector<std::vector<std::string>> errors;  // why a cell is missing
  std::vector<std::vector<bool>> masked;         // p > alpha, missing, or diagonal
};

/// All pairwise reports. Throws SchemaError for fewer than two columns and
/// ParameterError for alpha outside (0, 1].
CorrelationMatrix correlation_matrix(const MetricTable& table, double alpha);

struct LinkageEntry {
  std::string x;
  std::string y;
  std::optional<CorrelationReport> report;
  std::string error;
};

struct LinkageReport {
  std::vector<LinkageEntry> headline;     // max_id against log_ppl, sample_complexity, final_ppl
  std::vector<LinkageEntry> descriptors;  // each descriptor against max_id and log_ppl
};

/// Throws SchemaError when max_id, log_ppl, sample_complexity or final_ppl is
/// absent.
LinkageReport linkage_report(const MetricTable& table);

}  // namespace idlab
