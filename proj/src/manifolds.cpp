#include "idlab/manifolds.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "eigen_util.hpp"
#include "idlab/errors.hpp"

namespace idlab {
namespace {

constexpr std::uint64_t kRotationStream = 0x9E3779B97F4A7C15ULL;

void sample_direction(std::mt19937_64& rng, std::normal_distribution<double>& normal,
                      std::span<double> out) {
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& v : out) {
      v = normal(rng);
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : out) v *= inv;
}

}  // namespace

std::string_view to_string(ManifoldFamily family) {
  switch (family) {
    case ManifoldFamily::UniformBall: return "uniform_ball";
    case ManifoldFamily::UniformCube: return "uniform_cube";
    case ManifoldFamily::SphereSurface: return "sphere_surface";
    case ManifoldFamily::SwissRoll: return "swiss_roll";
    case ManifoldFamily::LinearSubspace: return "linear_subspace";
    case ManifoldFamily::GaussianBlob: return "gaussian_blob";
  }
  return "unknown";
}

ManifoldFamily parse_manifold_family(std::string_view name) {
  for (auto f : {ManifoldFamily::UniformBall, ManifoldFamily::UniformCube,
                 ManifoldFamily::SphereSurface, ManifoldFamily::SwissRoll,
                 ManifoldFamily::LinearSubspace, ManifoldFamily::GaussianBlob}) {
    if (to_string(f) == name) return f;
  }
  throw ParameterError("unknown manifold family '" + std::string(name) + "'");
}

std::size_t minimal_embedding(ManifoldFamily family, std::size_t d) {
  switch (family) {
    case ManifoldFamily::SphereSurface: return d + 1;
    case ManifoldFamily::SwissRoll: return 3;
    default: return d;
  }
}

std::vector<double> random_rotation(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  std::vector<double> out(dim * dim);
  Eigen::Map<detail::RowMatrix>(out.data(), q.rows(), q.cols()) = q;
  return out;
}

GeneratedCloud generate(const ManifoldSpec& spec) {
  const std::size_t d = spec.d_intrinsic;
  if (spec.n == 0) throw ParameterError("manifold sample count must be positive");
  if (d == 0) throw ParameterError("intrinsic dimension must be positive");
  if (spec.family == ManifoldFamily::SwissRoll && d != 2) {
    throw ParameterError("swiss_roll has intrinsic dimension 2");
  }
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
    throw ParameterError("noise_sigma must be finite and >= 0");
  }
  const std::size_t m = minimal_embedding(spec.family, d);
  if (spec.d_ambient < m) {
    throw ParameterError(std::string(to_string(spec.family)) + " with d=" + std::to_string(d) +
                         " needs at least " + std::to_string(m) + " ambient dimensions, got " +
                         std::to_string(spec.d_ambient));
  }

  const std::size_t n = spec.n;
  const std::size_t dim = spec.d_ambient;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;

  std::vector<double> base(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> row(base.data() + i * m, m);
    switch (spec.family) {
      case ManifoldFamily::UniformBall: {
        sample_direction(rng, normal, row);
        const double radius = std::pow(unit(rng), 1.0 / static_cast<double>(d));
        for (double& v : row) v *= radius;
        break;
      }
      case ManifoldFamily::UniformCube:
        for (double& v : row) v = unit(rng);
        break;
      case ManifoldFamily::SphereSurface:
        sample_direction(rng, normal, row);
        break;
      case ManifoldFamily::SwissRoll: {
        const double t = 1.5 * std::numbers::pi * (1.0 + 2.0 * unit(rng));
        const double h = 21.0 * unit(rng);
        row[0] = t * std::cos(t);
        row[1] = h;
        row[2] = t * std::sin(t);
        break;
      }
      case ManifoldFamily::LinearSubspace:
        for (double& v : row) v = 2.0 * unit(rng) - 1.0;
        break;
      case ManifoldFamily::GaussianBlob:
        for (double& v : row) v = normal(rng);
        break;
    }
  }

  std::vector<double> out(n * dim, 0.0);
  if (dim == m) {
    out = std::move(base);
  } else {
    const auto rot = random_rotation(dim, spec.seed ^ kRotationStream);
    // Padded row x (zeros past m) maps to x Q^T; only the first m columns of Q matter.
    Eigen::Map<const detail::RowMatrix> q(rot.data(), static_cast<Eigen::Index>(dim),
                                          static_cast<Eigen::Index>(dim));
    Eigen::Map<const detail::RowMatrix> x(base.data(), static_cast<Eigen::Index>(n),
                                          static_cast<Eigen::Index>(m));
    Eigen::Map<detail::RowMatrix> y(out.data(), static_cast<Eigen::Index>(n),
                                    static_cast<Eigen::Index>(dim));
    y.noalias() = x * q.leftCols(static_cast<Eigen::Index>(m)).transpose();
  }

  if (spec.noise_sigma > 0.0) {
    for (double& v : out) v += spec.noise_sigma * normal(rng);
  }
  return {PointCloud(n, dim, std::move(out)), spec.family == ManifoldFamily::SwissRoll ? 2 : d};
}

}  // namespace idlab
