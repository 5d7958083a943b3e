#include <gtest/gtest.h>

#include <limits>
#include <numbers>

#include "idlab/errors.hpp"
#include "idlab/estimators.hpp"
#include "idlab/manifolds.hpp"
#include "idlab/parallel.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace idlab;

namespace {

const PointCloud& unit_square() {
  static const PointCloud c = testutil::uniform_cloud(10000, 2, 2024);
  return c;
}

PointCloud segment(std::size_t n, std::uint64_t seed) {
  return testutil::uniform_cloud(n, 1, seed);
}

PointCloud ball(std::size_t d, std::size_t ambient, std::size_t n, std::uint64_t seed) {
  return generate({ManifoldFamily::UniformBall, d, ambient, n, 0.0, seed}).cloud;
}

}  // namespace

// ---- registry -------------------------------------------------------------

TEST(Registry, NineEstimatorsWithDefaults) {
  const auto& reg = estimator_registry();
  ASSERT_EQ(reg.size(), 9u);
  std::vector<std::string> names;
  for (const auto& e : reg) names.push_back(e.name);
  EXPECT_EQ(names, (std::vector<std::string>{"pca", "fishers", "corrint", "twonn", "ess", "tle",
                                             "mle", "mom", "mada"}));
  EXPECT_EQ(make_spec("mom").param("k"), 100.0);
  EXPECT_EQ(make_spec("tle").param("k"), 20.0);
  EXPECT_EQ(make_spec("twonn").param("discard"), 0.1);
  EXPECT_EQ(make_spec("corrint").param("k1"), 10.0);
  EXPECT_EQ(make_spec("corrint").param("k2"), 20.0);
  EXPECT_EQ(make_spec("fishers").param("cond"), 10.0);
  EXPECT_EQ(make_spec("pca").locality, Locality::Global);
  EXPECT_EQ(make_spec("mle").locality, Locality::Local);
}

TEST(Registry, RejectsUnknownAndOutOfRange) {
  EXPECT_THROW(make_spec("danco"), RegistryError);
  EXPECT_THROW(estimator_info("nope"), RegistryError);
  EXPECT_THROW(make_spec("mle", {{"kk", 3}}), ParameterError);
  EXPECT_THROW(make_spec("mle", {{"k", 2.5}}), ParameterError);
  EXPECT_THROW(make_spec("twonn", {{"discard", 1.0}}), ParameterError);
  EXPECT_THROW(make_spec("corrint", {{"k1", 20}, {"k2", 10}}), ParameterError);
  EXPECT_THROW(make_spec("pca", {{"k", 0.5}}), ParameterError);
  EXPECT_NO_THROW(make_spec("mle", {{"k", 5}}));
}

TEST(Registry, DefaultAlphaGrid) {
  const auto g = default_alpha_grid();
  ASSERT_EQ(g.size(), 20u);
  EXPECT_DOUBLE_EQ(g.front(), 0.6);
  EXPECT_DOUBLE_EQ(g.back(), 0.98);
}

TEST(Dispatch, MatchesDirectCall) {
  const auto& c = unit_square();
  EXPECT_EQ(estimate(make_spec("twonn"), c).value, estimate_twonn(c).value);
  EXPECT_EQ(estimate(make_spec("mle"), c).value, estimate_mle(c).value);
  EXPECT_EQ(estimate(make_spec("pca"), c).value, estimate_pca(c).value);
}

TEST(Dispatch, DeduplicatesBeforeNeighborEstimators) {
  const auto base = testutil::gaussian_cloud(10, 3, 5);
  std::vector<double> v;
  for (int copy = 0; copy < 100; ++copy) v.insert(v.end(), base.data().begin(), base.data().end());
  const PointCloud c(1000, 3, std::move(v));
  const auto e = estimate(make_spec("mle", {{"k", 5}}), c);
  EXPECT_EQ(e.n_used, 10u);
  EXPECT_EQ(e.diagnostics.at("n_duplicates"), 990.0);
}

TEST(Dispatch, AllNineFiniteOnUnitSquare) {
  for (const auto& info : estimator_registry()) {
    const auto e = estimate(make_spec(info.name), unit_square());
    EXPECT_TRUE(std::isfinite(e.value)) << info.name;
    EXPECT_GT(e.value, 0.0) << info.name;
    EXPECT_LE(e.n_used, unit_square().n()) << info.name;
  }
}

TEST(Dispatch, IndependentOfThreadCount) {
  const auto c = ball(4, 8, 3000, 17);
  for (const auto& info : estimator_registry()) {
    set_thread_count(1);
    const double a = estimate(make_spec(info.name), c).value;
    set_thread_count(3);
    const double b = estimate(make_spec(info.name), c).value;
    set_thread_count(0);
    EXPECT_EQ(a, b) << info.name;
  }
}

TEST(UniqueRows, FirstOccurrencesAscending) {
  const auto c = PointCloud::from_rows({{1, 2}, {0, 0}, {1, 2}, {-0.0, 0}, {3, 3}});
  EXPECT_EQ(unique_row_indices(c), (std::vector<std::size_t>{0, 1, 4}));
}

// ---- PCA ------------------------------------------------------------------

TEST(Pca, ExactRankOfPlaneInTenDims) {
  const auto basis = testutil::gaussian_cloud(2, 10, 1);
  const auto coef = testutil::gaussian_cloud(500, 2, 2);
  std::vector<double> v(500 * 10, 0.0);
  for (std::size_t i = 0; i < 500; ++i) {
    for (std::size_t j = 0; j < 10; ++j) v[i * 10 + j] = coef(i, 0) * basis(0, j) + coef(i, 1) * basis(1, j);
  }
  EXPECT_EQ(estimate_pca(PointCloud(500, 10, std::move(v))).value, 2.0);
}

TEST(Pca, CircleIsTwo) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) {
    const double t = u(rng);
    v.push_back(std::cos(t));
    v.push_back(std::sin(t));
  }
  EXPECT_EQ(estimate_pca(PointCloud(1000, 2, std::move(v))).value, 2.0);
}

TEST(Pca, IsotropicGaussianIsFull) {
  EXPECT_EQ(estimate_pca(testutil::gaussian_cloud(5000, 5, 4)).value, 5.0);
}

TEST(Pca, IdenticalPointsAreDegenerate) {
  EXPECT_THROW(estimate_pca(PointCloud(5, 2, std::vector<double>(10, 3.0))), DegenerateError);
}

TEST(Pca, WideMatrixUsesGram) {
  // D > N: rank is bounded by N - 1 after centering.
  const auto c = testutil::gaussian_cloud(6, 40, 9);
  EXPECT_EQ(estimate_pca(c, 1e6).value, 5.0);
}

// ---- FisherS --------------------------------------------------------------

TEST(Fishers, SphereFiveSelfConsistent) {
  const auto g = generate({ManifoldFamily::SphereSurface, 5, 6, 10000, 0.0, 31});
  EXPECT_NEAR(estimate_fishers(g.cloud).value, 5.0, 1.0);
}

TEST(Fishers, SphereTenWithinBand) {
  const auto g = generate({ManifoldFamily::SphereSurface, 10, 11, 10000, 0.0, 32});
  EXPECT_NEAR(estimate_fishers(g.cloud).value, 10.0, 1.5);
}

TEST(Fishers, AnisotropyLowersEstimate) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<double> iso(4000 * 10), aniso(4000 * 10);
  for (std::size_t i = 0; i < 4000; ++i) {
    for (std::size_t j = 0; j < 10; ++j) {
      const double z = g(rng);
      iso[i * 10 + j] = z;
      aniso[i * 10 + j] = z * (j < 5 ? 1.0 : 10.0);
    }
  }
  const double di = estimate_fishers(PointCloud(4000, 10, std::move(iso))).value;
  const double da = estimate_fishers(PointCloud(4000, 10, std::move(aniso))).value;
  EXPECT_LE(da, di);
}

TEST(Fishers, Preconditions) {
  EXPECT_THROW(estimate_fishers(testutil::gaussian_cloud(49, 3, 1)), SampleError);
  EXPECT_NO_THROW(estimate_fishers(testutil::gaussian_cloud(50, 3, 2)));
}

// ---- CorrInt --------------------------------------------------------------

TEST(CorrInt, SegmentIsOne) {
  EXPECT_NEAR(estimate_corrint(segment(5000, 6)).value, 1.0, 0.15);
}

TEST(CorrInt, SquareIsTwo) {
  EXPECT_NEAR(estimate_corrint(unit_square()).value, 2.0, 0.3);
}

namespace {

// Clusters of 11 points at mutual distance exactly 1, clusters far apart.
PointCloud simplex_clusters(std::size_t clusters, std::size_t size) {
  const std::size_t d = size + 1;
  std::vector<double> v;
  for (std::size_t c = 0; c < clusters; ++c) {
    for (std::size_t i = 0; i < size; ++i) {
      std::vector<double> row(d, 0.0);
      row[i] = std::sqrt(0.5);
      row[size] = 100.0 * static_cast<double>(c);
      v.insert(v.end(), row.begin(), row.end());
    }
  }
  return {clusters * size, d, std::move(v)};
}

}  // namespace

TEST(CorrInt, DegenerateRadii) {
  // k1 and k2 both inside a 21-point simplex: r1 == r2.
  EXPECT_THROW(estimate_corrint(simplex_clusters(3, 21)), DegenerateError);
  // 11-point simplices: r1 = 1 and no pair is strictly closer, C(r1) = 0.
  EXPECT_THROW(estimate_corrint(simplex_clusters(3, 11)), DegenerateError);
}

// ---- TwoNN ----------------------------------------------------------------

TEST(TwoNN, ForcedSlopeThree) {
  const std::size_t n = 1000;
  std::vector<double> mu;
  for (std::size_t i = 1; i < n; ++i) mu.push_back(std::pow(1.0 - double(i) / double(n), -1.0 / 3.0));
  mu.push_back(1e6);
  std::shuffle(mu.begin(), mu.end(), std::mt19937_64(1));
  const auto fit = twonn_fit(mu, 0.1);
  EXPECT_NEAR(fit.slope, 3.0, 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_EQ(fit.n_fit, 900u);
}

TEST(TwoNN, SquareIsTwo) {
  const auto e = estimate_twonn(unit_square());
  EXPECT_NEAR(e.value, 2.0, 0.2);
  EXPECT_GT(e.diagnostics.at("r_squared"), 0.9);
}

TEST(TwoNN, TenBallUnderestimatesModestly) {
  const double v = estimate_twonn(ball(10, 100, 10000, 77)).value;
  EXPECT_GE(v, 8.0);
  EXPECT_LE(v, 10.0);
}

TEST(TwoNN, SampleErrors) {
  EXPECT_THROW(estimate_twonn(testutil::gaussian_cloud(19, 2, 1)), SampleError);
  // 11 ratios, 10% discarded: floor(9.9) = 9 < 10 points left to fit.
  std::vector<double> few(11, 2.0);
  EXPECT_THROW(twonn_fit(few, 0.1), SampleError);
  std::vector<double> enough{1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0, 2.1, 2.2};
  EXPECT_EQ(twonn_fit(enough, 0.1).n_fit, 10u);
}

// ---- ESS ------------------------------------------------------------------

TEST(Ess, ExpectedSineMatchesMonteCarlo) {
  EXPECT_NEAR(ess_expected(2), oracle::mc_mean_sine(2, 400000, 1), 1e-2);
  EXPECT_NEAR(ess_expected(3), oracle::mc_mean_sine(3, 400000, 2), 1e-2);
  EXPECT_NEAR(ess_expected(7), oracle::mc_mean_sine(7, 400000, 3), 1e-2);
  EXPECT_NEAR(ess_expected(2), 2.0 / std::numbers::pi, 1e-12);
  EXPECT_NEAR(ess_expected(3), std::numbers::pi / 4.0, 1e-12);
  EXPECT_EQ(ess_expected(1), 0.0);
}

TEST(Ess, CalibrationMonotoneAndInvertible) {
  double prev = ess_expected(1.0);
  for (double d = 1.05; d <= 200.0; d += 0.05) {
    const double v = ess_expected(d);
    EXPECT_GT(v, prev) << d;
    prev = v;
  }
  for (double d : {1.3, 2.0, 4.7, 10.0, 55.5, 150.0}) {
    const double s = ess_expected(d);
    const double back = ess_invert(s, 200.0);
    EXPECT_LT(std::abs(ess_expected(back) - s), 1e-9);
    EXPECT_NEAR(back, d, 1e-5 * d);
  }
}

TEST(Ess, OrthogonalPairsAndCeiling) {
  // Three mutually orthogonal vectors in R^10: every |sin| is 1.
  std::vector<double> v(30, 0.0);
  v[0] = 1.0;
  v[11] = 2.0;
  v[22] = 0.5;
  const auto s = mean_pair_sine(v, 3, 10);
  ASSERT_TRUE(s);
  EXPECT_EQ(*s, 1.0);
  EXPECT_THROW(ess_invert(*s, 10.0), InversionError);
  // Just below 1 but above ess(D): clamps to the bracket ceiling D.
  bool clamped = false;
  EXPECT_EQ(ess_invert(0.999, 10.0, &clamped), 10.0);
  EXPECT_TRUE(clamped);
}

TEST(Ess, CenteringAndZeroVectors) {
  // Centered orthogonal triple ends up at 120 degrees.
  std::vector<double> v{1, 0, 0, 0, 1, 0, 0, 0, 1};
  EXPECT_NEAR(*local_skewness(v, 3, 3), std::sqrt(3.0) / 2.0, 1e-15);
  // A zero vector is skipped; all-zero gives nothing.
  std::vector<double> z{0, 0, 1, 0, 0, 1};
  EXPECT_EQ(*mean_pair_sine(z, 3, 2), 1.0);
  std::vector<double> zz(6, 0.0);
  EXPECT_FALSE(mean_pair_sine(zz, 3, 2));
}

TEST(Ess, FiveBallInFifty) {
  EXPECT_NEAR(estimate_ess(ball(5, 50, 10000, 91)).value, 5.0, 1.0);
}

// ---- TLE ------------------------------------------------------------------

TEST(Tle, PooledMleOnPowerLawSamples) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u;
  const double r = 2.5;
  std::vector<double> x(2000);
  for (double& v : x) v = r * std::pow(u(rng), 1.0 / 4.0);
  const auto d = pooled_log_mle(x, r);
  ASSERT_TRUE(d);
  EXPECT_NEAR(*d, 4.0, 0.5);
}

TEST(Tle, EquidistantNeighborhoodExcluded) {
  // Query at the origin, neighbors at the basis vectors: every distance is
  // equal, so all normalized samples sit at the boundary and carry no signal.
  const std::size_t k = 5, dim = 5;
  std::vector<double> nb(k * dim, 0.0);
  for (std::size_t i = 0; i < k; ++i) nb[i * dim + i] = 1.0;
  std::vector<double> dists(k, 1.0);
  EXPECT_FALSE(tle_local(nb, dists, dim));
  std::vector<double> flat(10, 3.0);
  EXPECT_FALSE(pooled_log_mle(flat, 3.0));
}

TEST(Tle, SquareIsTwo) {
  EXPECT_NEAR(estimate_tle(unit_square()).value, 2.0, 0.4);
}

// ---- MLE ------------------------------------------------------------------

TEST(Mle, ReciprocalOfMeanLogRatio) {
  // ln(r_k / r_j) = 1/3 for every j < k.
  const double rk = std::exp(1.0);
  std::vector<double> d{std::exp(2.0 / 3.0), std::exp(2.0 / 3.0), std::exp(2.0 / 3.0), rk};
  EXPECT_NEAR(mle_local(d), 3.0, 1e-12);
  std::vector<double> equal(5, 2.0);
  EXPECT_THROW(mle_local(equal), DegenerateError);
  std::vector<double> zero{0.0, 1.0, 2.0};
  EXPECT_THROW(mle_local(zero), DegenerateError);
}

TEST(Mle, SquareIsTwo) {
  EXPECT_NEAR(estimate_mle(unit_square()).value, 2.0, 0.2);
}

// ---- MOM ------------------------------------------------------------------

TEST(Mom, ClosedFormLinearProfile) {
  // F(r) = r / w: first moment w / 2. Evenly spaced distances on [0, w].
  std::vector<double> d{0, 1, 2, 3, 4, 5, 6};
  EXPECT_EQ(*mom_local(d), 1.0);
}

TEST(Mom, ClosedFormQuadraticProfile) {
  // F(r) = (r / w)^2: first moment 2w / 3. Profile with mean 4 and w = 6.
  std::vector<double> d{2, 3, 4, 5, 6};
  EXPECT_EQ(*mom_local(d), 2.0);
}

TEST(Mom, NoSpreadIsInvalid) {
  std::vector<double> d(4, 1.0);
  EXPECT_FALSE(mom_local(d));
}

TEST(Mom, FiveBall) {
  EXPECT_NEAR(estimate_mom(ball(5, 5, 10000, 13)).value, 5.0, 1.0);
}

// ---- MADA -----------------------------------------------------------------

TEST(Mada, ClosedFormRatios) {
  std::vector<double> two{0.5, 1.0, 1.5, 2.0};  // r_4 / r_2 = 2
  EXPECT_EQ(*mada_local(two), 1.0);
  // No pair of doubles has ratio exactly sqrt 2; on the nearest one the exact
  // answer is 2 - 1.9e-16, which rounds to 1.9999999999999998.
  std::vector<double> root{0.5, 1.0, 1.2, std::numbers::sqrt2};
  EXPECT_NEAR(*mada_local(root), 2.0, 4 * std::numeric_limits<double>::epsilon());
  std::vector<double> flat{1.0, 1.0, 1.0, 1.0};
  EXPECT_FALSE(mada_local(flat));
  // Odd k uses ceil(k / 2): r_5 / r_3.
  std::vector<double> odd{0.1, 0.2, 1.0, 1.5, 2.0};
  EXPECT_EQ(*mada_local(odd), 1.0);
}

TEST(Mada, SquareIsTwo) {
  EXPECT_NEAR(estimate_mada(unit_square()).value, 2.0, 0.3);
}

TEST(Mada, AllFlatIsDegenerate) {
  EXPECT_THROW(estimate_mada(simplex_clusters(3, 21)), DegenerateError);
}

// ---- curved manifolds ------------------------------------------------------

TEST(Benchmark, NeighborEstimatorsBeatPcaOnCurvedManifolds) {
  const auto circle = generate({ManifoldFamily::SphereSurface, 1, 2, 2000, 0.0, 3});
  const auto roll = generate({ManifoldFamily::SwissRoll, 2, 3, 5000, 0.0, 4});
  for (const auto* g : {&circle, &roll}) {
    const double truth = static_cast<double>(g->ground_truth_id);
    const double pca_err = std::abs(estimate_pca(g->cloud).value - truth);
    EXPECT_LE(std::abs(estimate_twonn(g->cloud).value - truth), pca_err);
    EXPECT_LE(std::abs(estimate_mle(g->cloud).value - truth), pca_err);
  }
}
