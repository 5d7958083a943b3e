#include "idlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "idlab/errors.hpp"

namespace idlab {

namespace {

// Ranks are multiples of 1/2, so doubled ranks are integers and every sum
// below is exact for any n of practical size. That makes rho independent of
// row order and lets permutations be compared without rounding.
struct RankSums {
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
};

RankSums rank_sums(const std::vector<double>& rx, const std::vector<double>& ry) {
  RankSums s;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double a = 2.0 * rx[i];
    const double b = 2.0 * ry[i];
    s.sx += a;
    s.sy += b;
    s.sxx += a * a;
    s.syy += b * b;
    s.sxy += a * b;
  }
  return s;
}

}  // namespace

std::vector<double> average_ranks(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

double t_approx_p(double rho, std::size_t n) {
  if (n < 3) throw SampleError("t approximation needs n >= 3");
  if (std::abs(rho) >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = std::abs(rho) * std::sqrt(df / (1.0 - rho * rho));
  const boost::math::students_t dist(df);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, t)), 0.0, 1.0);
}

double exact_permutation_p(const std::vector<double>& rx, const std::vector<double>& ry) {
  const std::size_t n = rx.size();
  if (n != ry.size()) throw ParameterError("rank vectors differ in length");
  if (n > 12) throw ParameterError("exact permutation p is limited to n <= 12");
  const RankSums s = rank_sums(rx, ry);
  const double nn = static_cast<double>(n);
  // Sums other than sxy are permutation-invariant, so compare n*sxy - sx*sy.
  const double observed = std::abs(nn * s.sxy - s.sx * s.sy);
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = 2.0 * rx[i];
    b[i] = 2.0 * ry[i];
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::uint64_t hits = 0, total = 0;
  do {
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) sxy += a[i] * b[perm[i]];
    if (std::abs(nn * sxy - s.sx * s.sy) >= observed) ++hits;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

CorrelationReport spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ParameterError("spearman inputs differ in length");
  std::vector<double> px, py;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isfinite(x[i]) && std::isfinite(y[i])) {
      px.push_back(x[i]);
      py.push_back(y[i]);
    }
  }
  const std::size_t n = px.size();
  if (n < 3) throw SampleError("spearman needs at least 3 complete pairs, got " + std::to_string(n));
  const auto rx = average_ranks(px);
  const auto ry = average_ranks(py);
  const RankSums s = rank_sums(rx, ry);
  const double nn = static_cast<double>(n);
  const double vx = nn * s.sxx - s.sx * s.sx;
  const double vy = nn * s.syy - s.sy * s.sy;
  if (vx <= 0.0 || vy <= 0.0) throw DegenerateError("spearman input has zero rank variance");

  CorrelationReport r;
  r.n = n;
  r.rho = std::clamp((nn * s.sxy - s.sx * s.sy) / std::sqrt(vx * vy), -1.0, 1.0);
  if (n <= kExactPermutationMaxN) {
    r.p_value = exact_permutation_p(rx, ry);
    r.p_method = "exact";
  } else {
    r.p_value = t_approx_p(r.rho, n);
    r.p_method = "t";
  }
  return r;
}

void MetricTable::validate() const {
  for (std::size_t a = 0; a < columns.size(); ++a) {
    for (std::size_t b = a + 1; b < columns.size(); ++b) {
      if (columns[a] == columns[b]) throw SchemaError("duplicate column '" + columns[a] + "'");
    }
  }
  if (cells.size() != row_ids.size()) throw SchemaError("row ids and rows differ in count");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].size() != columns.size()) {
      throw SchemaError("row " + std::to_string(i) + " has " + std::to_string(cells[i].size()) +
                            " cells, expected " + std::to_string(columns.size()),
                        i);
    }
  }
}

std::optional<std::size_t> MetricTable::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] == name) return j;
  }
  return std::nullopt;
}

std::vector<double> MetricTable::column(std::size_t j) const {
  std::vector<double> out;
  out.reserve(cells.size());
  for (const auto& row : cells) out.push_back(row.at(j));
  return out;
}

CorrelationMatrix correlation_matrix(const MetricTable& table, double alpha) {
  table.validate();
  if (table.columns.size() < 2) throw SchemaError("correlation matrix needs at least 2 columns");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1]");
  const std::size_t m = table.columns.size();
  CorrelationMatrix out;
  out.columns = table.columns;
  out.alpha = alpha;
  out.cells.assign(m, std::vector<std::optional<CorrelationReport>>(m));
  out.errors.assign(m, std::vector<std::string>(m));
  out.masked.assign(m, std::vector<bool>(m, true));

  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j < m; ++j) cols.push_back(table.column(j));

  for (std::size_t a = 0; a < m; ++a) {
    std::size_t present = 0;
    for (double v : cols[a]) present += std::isfinite(v) ? 1 : 0;
    CorrelationReport diag;
    diag.rho = 1.0;
    diag.p_value = 0.0;
    diag.n = present;
    diag.p_method = "diagonal";
    out.cells[a][a] = diag;
    for (std::size_t b = a + 1; b < m; ++b) {
      try {
        CorrelationReport r = spearman(cols[a], cols[b]);
        const bool shown = r.p_value <= alpha;
        if (shown) r.significant_at = alpha;
        out.cells[a][b] = out.cells[b][a] = r;
        out.masked[a][b] = out.masked[b][a] = !shown;
      } catch (const Error& e) {
        out.errors[a][b] = out.errors[b][a] = std::string(to_string(e.kind())) + ": " + e.what();
      }
    }
  }
  return out;
}

namespace {

LinkageEntry link(const MetricTable& t, const std::string& x, const std::string& y) {
  LinkageEntry e{x, y, std::nullopt, ""};
  try {
    e.report = spearman(t.column(*t.column_index(x)), t.column(*t.column_index(y)));
  } catch (const Error& err) {
    e.error = std::string(to_string(err.kind())) + ": " + err.what();
  }
  return e;
}

}  // namespace

LinkageReport linkage_report(const MetricTable& table) {
  table.validate();
  for (const char* req : {"max_id", "log_ppl", "sample_complexity", "final_ppl"}) {
    if (!table.column_index(req)) {
      throw SchemaError(std::string("metric table lacks required column '") + req + "'");
    }
  }
  LinkageReport r;
  for (const char* y : {"log_ppl", "sample_complexity", "final_ppl"}) {
    r.headline.push_back(link(table, "max_id", y));
  }
  for (const char* d : {"vocab_size", "vocab_entropy", "avg_seq_len", "n_tokens"}) {
    if (!table.column_index(d)) continue;
    r.descriptors.push_back(link(table, d, "max_id"));
    r.descriptors.push_back(link(table, d, "log_ppl"));
  }
  return r;
}

}  // namespace idlab
