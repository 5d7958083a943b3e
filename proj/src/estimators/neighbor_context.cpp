#include <algorithm>
#include <numeric>
#include <string>

#include "idlab/errors.hpp"
#include "idlab/estimators.hpp"

namespace idlab {

std::vector<std::size_t> unique_row_indices(const PointCloud& cloud) {
  std::vector<std::size_t> order(cloud.n());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto row_less = [&](std::size_t a, std::size_t b) {
    const auto ra = cloud.row(a), rb = cloud.row(b);
    const auto cmp = std::lexicographical_compare_three_way(ra.begin(), ra.end(), rb.begin(),
                                                            rb.end(), std::weak_order);
    if (cmp != 0) return cmp < 0;
    return a < b;
  };
  std::sort(order.begin(), order.end(), row_less);

  std::vector<std::size_t> keep;
  keep.reserve(order.size());
  for (std::size_t m = 0; m < order.size(); ++m) {
    if (m == 0 || !std::ranges::equal(cloud.row(order[m]), cloud.row(order[m - 1]))) {
      keep.push_back(order[m]);
    }
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

namespace {

PointCloud deduplicate(const PointCloud& cloud) {
  const auto keep = unique_row_indices(cloud);
  if (keep.size() == cloud.n()) return cloud;
  return cloud.select_rows(keep);
}

}  // namespace

NeighborContext::NeighborContext(const PointCloud& cloud, std::size_t k_max)
    : cloud_(deduplicate(cloud)), n_input_(cloud.n()) {
  const std::size_t n = cloud_.n();
  if (n < 2) {
    throw SampleError("fewer than two distinct points (" + std::to_string(n) + " of " +
                      std::to_string(n_input_) + ")");
  }
  table_ = knn(cloud_, std::max<std::size_t>(1, std::min(k_max, n - 1)));
}

void NeighborContext::require(std::size_t k, std::string_view who) const {
  if (table_.k < k) {
    throw SampleError(std::string(who) + " needs more than " + std::to_string(k) +
                      " distinct points, got " + std::to_string(cloud_.n()));
  }
}

}  // namespace idlab
