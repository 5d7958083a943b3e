#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "idlab/neighbors.hpp"
#include "idlab/point_cloud.hpp"

namespace testutil {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("idlab_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline idlab::PointCloud gaussian_cloud(std::size_t n, std::size_t d, std::uint64_t seed,
                                        double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n * d);
  for (double& x : v) x = scale * g(rng);
  return {n, d, std::move(v)};
}

inline idlab::PointCloud uniform_cloud(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u;
  std::vector<double> v(n * d);
  for (double& x : v) x = u(rng);
  return {n, d, std::move(v)};
}

// Naive O(N^2) k-NN: canonical distances, full sort by (distance, index).
inline idlab::NeighborTable brute_knn(const idlab::PointCloud& c, std::size_t k) {
  idlab::NeighborTable t;
  t.n = c.n();
  t.k = k;
  t.dist.resize(c.n() * k);
  t.idx.resize(c.n() * k);
  std::vector<std::pair<double, std::size_t>> row;
  for (std::size_t i = 0; i < c.n(); ++i) {
    row.clear();
    for (std::size_t j = 0; j < c.n(); ++j) {
      if (j != i) row.emplace_back(idlab::distance(c.row(i), c.row(j)), j);
    }
    std::sort(row.begin(), row.end());
    for (std::size_t m = 0; m < k; ++m) {
      t.dist[i * k + m] = row[m].first;
      t.idx[i * k + m] = row[m].second;
    }
  }
  return t;
}

// Row-major D x D orthogonal matrix from Gram-Schmidt on Gaussian columns.
inline std::vector<double> gram_schmidt_rotation(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> q;
  while (q.size() < d) {
    std::vector<double> v(d);
    for (double& x : v) x = g(rng);
    for (const auto& u : q) {
      const double p = std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
      for (std::size_t i = 0; i < d; ++i) v[i] -= p * u[i];
    }
    const double nrm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (nrm < 1e-8) continue;
    for (double& x : v) x /= nrm;
    q.push_back(std::move(v));
  }
  std::vector<double> out(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] = q[i][j];
  }
  return out;
}

// x -> x R^T + shift, x * scale, or zero-padded.
inline idlab::PointCloud rotate(const idlab::PointCloud& c, const std::vector<double>& r) {
  const std::size_t d = c.d();
  std::vector<double> v(c.n() * d, 0.0);
  for (std::size_t i = 0; i < c.n(); ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      double s = 0.0;
      for (std::size_t b = 0; b < d; ++b) s += r[a * d + b] * c(i, b);
      v[i * d + a] = s;
    }
  }
  return {c.n(), d, std::move(v)};
}

inline idlab::PointCloud affine(const idlab::PointCloud& c, double scale, double shift) {
  std::vector<double> v(c.data().begin(), c.data().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = v[i] * scale + shift * static_cast<double>(1 + i % c.d());
  return {c.n(), c.d(), std::move(v)};
}

inline idlab::PointCloud pad_zeros(const idlab::PointCloud& c, std::size_t extra) {
  const std::size_t d = c.d() + extra;
  std::vector<double> v(c.n() * d, 0.0);
  for (std::size_t i = 0; i < c.n(); ++i) {
    for (std::size_t j = 0; j < c.d(); ++j) v[i * d + j] = c(i, j);
  }
  return {c.n(), d, std::move(v)};
}

}  // namespace testutil
