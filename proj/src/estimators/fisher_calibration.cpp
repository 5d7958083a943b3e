#include "idlab/fisher_calibration.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>

#include "idlab/errors.hpp"
#include "idlab/npy.hpp"
#include "json.hpp"

namespace idlab {
namespace {

constexpr const char* kTableFile = "fishers_calibration.npy";
constexpr const char* kSidecarFile = "fishers_calibration.json";

bool same_grid(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12) return false;
  }
  return true;
}

}  // namespace

double sphere_inseparability(double alpha, double d) {
  if (!(d > 0.0)) throw ParameterError("sphere dimension must be positive");
  if (alpha >= 1.0) return 0.0;
  if (alpha <= -1.0) return 1.0;
  const double tail = 0.5 * boost::math::ibeta(d / 2.0, 0.5, 1.0 - alpha * alpha);
  return alpha >= 0.0 ? tail : 1.0 - tail;
}

FisherCalibration::FisherCalibration(std::vector<double> alphas) : alphas_(std::move(alphas)) {
  table_.resize(kMaxDim * alphas_.size());
  for (std::size_t d = 1; d <= kMaxDim; ++d) {
    for (std::size_t a = 0; a < alphas_.size(); ++a) {
      table_[(d - 1) * alphas_.size() + a] =
          sphere_inseparability(alphas_[a], static_cast<double>(d));
    }
  }
}

double FisherCalibration::at(std::size_t d, std::size_t alpha_index) const {
  return table_.at((d - 1) * alphas_.size() + alpha_index);
}

double FisherCalibration::invert(std::size_t alpha_index, double p, bool* clamped) const {
  if (clamped) *clamped = false;
  // p_cal decreases in d for alpha > 0.
  if (p >= at(1, alpha_index)) {
    if (clamped) *clamped = p > at(1, alpha_index);
    return 1.0;
  }
  if (p <= at(kMaxDim, alpha_index)) {
    if (clamped) *clamped = p < at(kMaxDim, alpha_index);
    return static_cast<double>(kMaxDim);
  }
  std::size_t d = 1;
  while (at(d + 1, alpha_index) > p) ++d;
  const double lp = std::log(p);
  const double l0 = std::log(at(d, alpha_index));
  const double l1 = std::log(at(d + 1, alpha_index));
  return static_cast<double>(d) + (l0 - lp) / (l0 - l1);
}

std::filesystem::path FisherCalibration::cache_dir() {
  if (const char* env = std::getenv("IDLAB_CACHE_DIR"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) {
    return std::filesystem::path(xdg) / "idlab";
  }
  if (const char* home = std::getenv("HOME"); home && *home) {
    return std::filesystem::path(home) / ".cache" / "idlab";
  }
  return std::filesystem::temp_directory_path() / "idlab";
}

void FisherCalibration::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  npy::save_array(dir / kTableFile, kMaxDim, alphas_.size(), table_);
  nlohmann::json side;
  side["dims"] = nlohmann::json::array();
  for (std::size_t d = 1; d <= kMaxDim; ++d) side["dims"].push_back(d);
  side["alphas"] = alphas_;
  side["quantity"] = "mean inseparable fraction, uniform d-sphere in R^(d+1)";
  side["method"] = "regularized incomplete beta";
  std::ofstream out(dir / kSidecarFile);
  if (!out) throw IoError("cannot write " + (dir / kSidecarFile).string());
  out << side.dump(2) << '\n';
}

bool FisherCalibration::load(const std::filesystem::path& dir, std::span<const double> alphas,
                             FisherCalibration& out) {
  try {
    std::ifstream in(dir / kSidecarFile);
    if (!in) return false;
    const auto side = nlohmann::json::parse(in);
    const auto grid = side.at("alphas").get<std::vector<double>>();
    const auto dims = side.at("dims").get<std::vector<std::size_t>>();
    if (!same_grid(grid, alphas) || dims.size() != kMaxDim) return false;
    auto arr = npy::load_array(dir / kTableFile);
    if (arr.rows != kMaxDim || arr.cols != alphas.size()) return false;
    FisherCalibration c;
    c.alphas_ = grid;
    c.table_ = std::move(arr.values);
    out = std::move(c);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

const FisherCalibration& FisherCalibration::for_grid(std::span<const double> alphas) {
  static std::mutex mutex;
  static std::vector<std::unique_ptr<FisherCalibration>> cache;
  std::lock_guard lock(mutex);
  for (const auto& c : cache) {
    if (same_grid(c->alphas(), alphas)) return *c;
  }
  const auto dir = cache_dir();
  auto entry = std::unique_ptr<FisherCalibration>(new FisherCalibration());
  if (!load(dir, alphas, *entry)) {
    *entry = FisherCalibration(std::vector<double>(alphas.begin(), alphas.end()));
    try {
      entry->save(dir);
    } catch (const std::exception&) {
      // Read-only cache location: keep the in-memory table.
    }
  }
  cache.push_back(std::move(entry));
  return *cache.back();
}

}  // namespace idlab
