// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <numbers>
#include <sstream>

#include "idlab/bench.hpp"
#include "idlab/estimators.hpp"
#include "idlab/manifolds.hpp"
#include "idlab/neighbors.hpp"
#include "idlab/profiles.hpp"
#include "idlab/stats.hpp"
#include "idlab/textstats.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace idlab;

namespace {

// Tolerances.
constexpr double kBenchSeconds = 600.0;
constexpr double kEssMcTol = 1e-2;
// The ratio-sqrt2 profile cannot be represented: the nearest double ratio has
// exact answer 2 - 1.9e-16. Ratio-2 and the MOM profiles are checked bitwise.
constexpr double kMadaSqrt2Tol = 4 * std::numeric_limits<double>::epsilon();
constexpr std::size_t kEssMcPairs = 400000;
constexpr std::size_t kKnnInstances = 100;
constexpr std::size_t kKnnMaxN = 2000;
constexpr std::size_t kKnnMaxD = 64;
constexpr std::size_t kConvergeN = 50000;
constexpr double kConvergeMaxChange = 0.10;
constexpr double kConvergeNoiseSigmas = 3.0;  // allowed dip, in standard errors of the mean difference
constexpr std::size_t kConvergeSeeds = 10;
constexpr std::size_t kAblationDatasets = 200;
constexpr double kPplUlps = 8.0;  // exp(fl(ln V)) is off by up to ln V / 2 + 1 ulps
constexpr double kSpearmanPTol = 1e-12;
constexpr double kInvarianceTol = 1e-6;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;    // always printed
  std::ostringstream failures;  // printed first when failing
  void fail(const std::string& why) {
    failures << (pass ? "" : "; ") << why;
    pass = false;
  }
};

bool run(const char* name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string text = o.failures.str();
  if (!text.empty() && !o.detail.str().empty()) text += " |";
  text += o.detail.str();
  std::printf("%s %s (%.1fs) %s\n", o.pass ? "PASS" : "FAIL", name, sec, text.c_str());
  std::fflush(stdout);
  return o.pass;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

void accuracy_matrix(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cells = run_bench(BenchOptions{});
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::size_t passed = 0;
  for (const auto& c : cells) {
    if (c.pass) {
      ++passed;
    } else {
      o.fail(c.family + " d=" + std::to_string(c.d) + " " + c.estimator + " = " + num(c.value) +
             (c.error.empty() ? "" : " (" + c.error + ")"));
    }
  }
  if (sec >= kBenchSeconds) o.fail("runtime " + num(sec) + "s");
  if (o.pass) o.detail << passed << "/" << cells.size() << " cells, " << num(sec) << "s";
}

void closed_forms(Outcome& o) {
  const std::vector<double> linear{0, 1, 2, 3, 4, 5, 6};  // F(r) = r / 6
  const std::vector<double> quad{2, 3, 4, 5, 6};          // mean 2w/3 with w = 6
  const auto m1 = mom_local(linear), m2 = mom_local(quad);
  if (!m1 || *m1 != 1.0) o.fail("mom linear = " + (m1 ? num(*m1) : "none"));
  if (!m2 || *m2 != 2.0) o.fail("mom quadratic = " + (m2 ? num(*m2) : "none"));
  const std::vector<double> r2{0.5, 1.0, 1.5, 2.0};
  const std::vector<double> rs2{0.5, 1.0, 1.2, std::numbers::sqrt2};
  const auto a1 = mada_local(r2), a2 = mada_local(rs2);
  if (!a1 || *a1 != 1.0) o.fail("mada ratio 2 = " + (a1 ? num(*a1) : "none"));
  if (!a2 || std::abs(*a2 - 2.0) > kMadaSqrt2Tol) o.fail("mada ratio sqrt2 = " + (a2 ? num(*a2) : "none"));
  const double mc2 = oracle::mc_mean_sine(2, kEssMcPairs, 1);
  const double mc3 = oracle::mc_mean_sine(3, kEssMcPairs, 2);
  if (std::abs(ess_expected(2) - mc2) > kEssMcTol) o.fail("ess(2) vs MC " + num(mc2));
  if (std::abs(ess_expected(3) - mc3) > kEssMcTol) o.fail("ess(3) vs MC " + num(mc3));
  if (std::abs(ess_expected(2) - 2.0 / std::numbers::pi) > kEssMcTol) o.fail("ess(2) != 2/pi");
  if (std::abs(ess_expected(3) - std::numbers::pi / 4.0) > kEssMcTol) o.fail("ess(3) != pi/4");
  if (o.pass) o.detail << "ess(2)=" << num(ess_expected(2)) << " mc " << num(mc2) << ", ess(3)="
                       << num(ess_expected(3)) << " mc " << num(mc3);
}

void knn_exactness(Outcome& o) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> nd(20, kKnnMaxN), dd(1, kKnnMaxD), kd(1, 15);
  std::size_t mismatches = 0;
  for (std::size_t t = 0; t < kKnnInstances; ++t) {
    const std::size_t n = t == 0 ? kKnnMaxN : nd(rng);
    const std::size_t d = t == 0 ? kKnnMaxD : dd(rng);
    const std::size_t k = kd(rng);
    // Mix continuous and lattice data so ties are exercised.
    auto c = testutil::gaussian_cloud(n, d, 1000 + t);
    if (t % 4 == 3) {
      std::vector<double> v(c.data().begin(), c.data().end());
      for (double& x : v) x = std::round(2.0 * x);
      c = PointCloud(n, d, std::move(v));
    }
    const auto fast = knn(c, k);
    const auto ref = testutil::brute_knn(c, k);
    if (fast.idx != ref.idx || fast.dist != ref.dist) {
      ++mismatches;
      o.fail("instance " + std::to_string(t) + " (N=" + std::to_string(n) + ", D=" +
             std::to_string(d) + ", k=" + std::to_string(k) + ")");
    }
  }
  if (o.pass) o.detail << kKnnInstances << " instances identical";
}

void convergence_curves(Outcome& o) {
  const auto cloud = generate({ManifoldFamily::UniformBall, 10, 10, kConvergeN, 0.0, 2024}).cloud;
  const std::vector<std::size_t> sizes{200, 500, 1000, 2000, 5000, 10000, 20000, 50000};
  std::vector<std::uint64_t> seeds(kConvergeSeeds);
  std::iota(seeds.begin(), seeds.end(), 1);
  std::vector<EstimatorSpec> specs;
  for (const char* n : {"twonn", "mle", "mom", "mada", "tle", "corrint", "ess"}) specs.push_back(make_spec(n));
  const auto curves = convergence_multi(cloud, specs, sizes, seeds);
  const double m = static_cast<double>(seeds.size());
  for (const auto& c : curves) {
    std::ostringstream row;
    row << " " << c.estimator.name << "[";
    for (std::size_t i = 0; i < c.sizes.size(); ++i) row << (i ? " " : "") << num(c.mean_id[i]);
    row << "]";
    o.detail << row.str();
    if (c.sizes != sizes) {
      o.fail(c.estimator.name + " skipped sizes");
      continue;
    }
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
      const double se = std::sqrt((c.std_id[i] * c.std_id[i] + c.std_id[i + 1] * c.std_id[i + 1]) / m);
      if (c.mean_id[i + 1] < c.mean_id[i] - kConvergeNoiseSigmas * se) {
        o.fail(c.estimator.name + " decreases " + std::to_string(sizes[i]) + "->" +
               std::to_string(sizes[i + 1]) + ": " + num(c.mean_id[i]) + " -> " + num(c.mean_id[i + 1]));
      }
    }
    const std::size_t i10 = 5, i50 = 7;
    const double change = std::abs(c.mean_id[i50] - c.mean_id[i10]) / c.mean_id[i50];
    if (change >= kConvergeMaxChange) {
      o.fail(c.estimator.name + " changes " + num(100 * change) + "% from 10000 to 50000");
    }
  }
}

TokenDataset random_dataset(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nseq(1, 40), len(1, 60), vb(2, 500);
  std::uniform_real_distribution<double> u;
  TokenDataset d;
  d.vocab_bound = vb(rng);
  for (int s = nseq(rng); s > 0; --s) {
    std::vector<TokenId> seq(static_cast<std::size_t>(len(rng)));
    for (auto& t : seq) {
      t = static_cast<TokenId>(std::floor(static_cast<double>(d.vocab_bound) * u(rng) * u(rng)));
    }
    d.sequences.push_back(std::move(seq));
  }
  std::uniform_int_distribution<TokenId> id(0, d.vocab_bound - 1);
  for (int k = static_cast<int>(rng() % 3); k > 0; --k) d.special_tokens.insert(id(rng));
  if (static_cast<TokenId>(d.special_tokens.size()) >= d.vocab_bound) d.special_tokens.clear();
  return d;
}

void ablations(Outcome& o) {
  std::mt19937_64 rng(31);
  for (std::size_t t = 0; t < kAblationDatasets; ++t) {
    const auto d = random_dataset(rng);
    const auto b = descriptors(d);
    const auto p = transform_permuted(d, t);
    const auto s = transform_swapped(d, t);
    const auto r = transform_random(d, t);
    const auto dp = descriptors(p), ds = descriptors(s), dr = descriptors(r);
    const std::string tag = "dataset " + std::to_string(t) + ": ";
    if (dp.vocab_size != b.vocab_size || dp.vocab_entropy != b.vocab_entropy ||
        dp.avg_seq_len != b.avg_seq_len || dp.n_tokens != b.n_tokens ||
        token_frequencies(p) != token_frequencies(d)) {
      o.fail(tag + "permuted");
    }
    if (ds.vocab_size != b.vocab_size || ds.vocab_entropy != b.vocab_entropy ||
        ds.avg_seq_len != b.avg_seq_len || ds.n_tokens != b.n_tokens) {
      o.fail(tag + "swapped");
    }
    if (dr.avg_seq_len != b.avg_seq_len || dr.n_tokens != b.n_tokens) o.fail(tag + "random");
  }
  if (o.pass) o.detail << kAblationDatasets << " datasets";
}

void ppl_identities(Outcome& o) {
  for (double v : {2.0, 3.0, 10.0, 1000.0, 32000.0, 50257.0, 250000.0}) {
    for (std::size_t len : {1u, 7u, 512u}) {
      NllRecord r{{std::vector<double>(len, std::log(v)), std::vector<double>(len + 3, std::log(v))}};
      const auto p = dataset_ppl(r);
      const double tol = kPplUlps * std::numeric_limits<double>::epsilon() * v;
      if (std::abs(p.avg_ppl - v) > tol || std::abs(p.token_weighted_ppl - v) > tol) {
        o.fail("V=" + num(v) + " len " + std::to_string(len) + " gives " + num(p.avg_ppl));
      }
    }
  }
  for (std::size_t n : {1u, 2u, 3u, 100u, 4097u, 1000000u}) {
    const NllRecord r{{std::vector<double>(n, std::numbers::ln2)}};
    const double bits = dataset_ppl(r).coding_length_bits;
    if (bits != static_cast<double>(n)) o.fail(std::to_string(n) + " fair-coin tokens = " + num(bits) + " bits");
  }
}

void spearman_oracle(Outcome& o) {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.01, 50.0);
  std::uniform_int_distribution<int> small(1, 4);
  std::size_t checked = 0;
  for (std::size_t n = 3; n <= kExactPermutationMaxN; ++n) {
    for (int t = 0; t < 10; ++t) {
      std::vector<double> x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = t % 3 == 0 ? small(rng) : u(rng);
        y[i] = u(rng);
      }
      if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) continue;
      const auto r = spearman(x, y);
      const double ref = oracle::heap_enumeration_p(oracle::naive_ranks(x), oracle::naive_ranks(y));
      if (r.p_method != "exact" || std::abs(r.p_value - ref) > kSpearmanPTol) {
        o.fail("n=" + std::to_string(n) + " p=" + num(r.p_value) + " enumeration " + num(ref));
      }
      std::vector<double> lx(n), cy(n);
      for (std::size_t i = 0; i < n; ++i) {
        lx[i] = std::log(x[i]);
        cy[i] = y[i] * y[i] * y[i];
      }
      const auto tr = spearman(lx, cy);
      if (tr.rho != r.rho || tr.p_value != r.p_value) o.fail("n=" + std::to_string(n) + " not rank invariant");
      ++checked;
    }
  }
  for (std::size_t n : {9u, 20u, 57u}) {
    std::vector<double> x(n), y(n), lx(n), cy(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
      lx[i] = std::log(x[i]);
      cy[i] = y[i] * y[i] * y[i];
    }
    if (spearman(x, y).rho != spearman(lx, cy).rho) o.fail("n=" + std::to_string(n) + " not rank invariant");
  }
  if (o.pass) o.detail << checked << " small-n cases";
}

void invariance_suite(Outcome& o) {
  const auto g = generate({ManifoldFamily::UniformBall, 3, 6, 2000, 0.0, 123});
  std::vector<double> v(g.cloud.data().begin(), g.cloud.data().end());
  for (std::size_t i = 0; i < g.cloud.n(); ++i) v[i * 6] *= 1.7;
  const PointCloud base(g.cloud.n(), 6, std::move(v));
  const std::vector<std::pair<std::string, PointCloud>> variants{
      {"rotation", testutil::rotate(base, testutil::gram_schmidt_rotation(6, 99))},
      {"translation", testutil::affine(base, 1.0, 3.25)},
      {"scale 0.37", testutil::affine(base, 0.37, 0.0)},
      {"scale 250", testutil::affine(base, 250.0, 0.0)},
      {"zero padding", testutil::pad_zeros(base, 7)},
  };
  double worst = 0.0;
  for (const auto& info : estimator_registry()) {
    const auto spec = make_spec(info.name);
    const double ref = estimate(spec, base).value;
    for (const auto& [label, cloud] : variants) {
      const double diff = std::abs(estimate(spec, cloud).value - ref);
      worst = std::max(worst, diff);
      if (!(diff <= kInvarianceTol)) o.fail(info.name + " " + label + " off by " + num(diff));
    }
  }
  if (o.pass) o.detail << "worst deviation " << num(worst);
}

}  // namespace

int main() {
  bool ok = true;
  ok &= run("estimator-accuracy-matrix", accuracy_matrix);
  ok &= run("closed-form-checks", closed_forms);
  ok &= run("knn-exactness", knn_exactness);
  ok &= run("convergence-ten-ball", convergence_curves);
  ok &= run("ablation-invariants", ablations);
  ok &= run("ppl-identities", ppl_identities);
  ok &= run("spearman-oracle", spearman_oracle);
  ok &= run("invariance-suite", invariance_suite);
  std::printf("%s\n", ok ? "ALL PASS" : "SOME CRITERIA FAILED");
  return ok ? 0 : 1;
}
