#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "idlab/parallel.hpp"

namespace idlab::detail {

struct LocalMean {
  double mean = 0.0;
  std::size_t valid = 0;
};

/// Evaluates fn(i) -> optional<double> for every point in parallel and
/// averages the engaged, finite values in index order.
template <typename F>
LocalMean mean_of_local(std::size_t n, F&& fn) {
  std::vector<double> vals(n, std::nan(""));
  parallel_for(n, [&](std::size_t i) {
    if (const std::optional<double> v = fn(i); v && std::isfinite(*v)) vals[i] = *v;
  });
  LocalMean out;
  double sum = 0.0;
  for (double v : vals) {
    if (!std::isnan(v)) {
      sum += v;
      ++out.valid;
    }
  }
  out.mean = out.valid ? sum / static_cast<double>(out.valid) : std::nan("");
  return out;
}

}  // namespace idlab::detail
