#include "idlab/manifest.hpp"

#include <fstream>

#include "idlab/errors.hpp"
#include "idlab/npy.hpp"
#include "json.hpp"

namespace idlab {

using nlohmann::json;

void RunManifest::validate() const {
  if (layer_files.empty()) throw ParameterError("manifest lists no layer files");
  if (context_window < 1) throw ParameterError("context_window must be >= 1");
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }

  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  RunManifest m;
  try {
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.model_id = j.at("model_id").get<std::string>();
    for (const auto& f : j.at("layer_files")) m.layer_files.push_back(resolve(f.get<std::string>()));
    if (j.contains("nll_file") && !j["nll_file"].is_null()) {
      m.nll_file = resolve(j["nll_file"].get<std::string>());
    }
    if (j.contains("token_file") && !j["token_file"].is_null()) {
      m.token_file = resolve(j["token_file"].get<std::string>());
    }
    const auto cw = j.at("context_window").get<std::int64_t>();
    if (cw < 1) throw ParameterError("context_window must be >= 1");
    m.context_window = static_cast<std::uint64_t>(cw);
    if (j.contains("seed")) m.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw SchemaError("manifest " + path.string() + ": " + e.what());
  }
  m.validate();
  return m;
}

void save_manifest(const RunManifest& m, const std::filesystem::path& path) {
  json j;
  j["dataset_id"] = m.dataset_id;
  j["model_id"] = m.model_id;
  j["layer_files"] = json::array();
  for (const auto& f : m.layer_files) j["layer_files"].push_back(f.string());
  j["nll_file"] = m.nll_file ? json(m.nll_file->string()) : json(nullptr);
  j["token_file"] = m.token_file ? json(m.token_file->string()) : json(nullptr);
  j["context_window"] = m.context_window;
  j["seed"] = m.seed;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << j.dump(2) << '\n';
}

LayerStack load_layer_stack(const RunManifest& manifest) {
  manifest.validate();
  std::vector<PointCloud> layers;
  layers.reserve(manifest.layer_files.size());
  for (std::size_t j = 0; j < manifest.layer_files.size(); ++j) {
    PointCloud c = npy::load_matrix(manifest.layer_files[j]);
    if (!layers.empty() && (c.n() != layers.front().n() || c.d() != layers.front().d())) {
      throw ConsistencyError("layer " + std::to_string(j) + " (" +
                                 manifest.layer_files[j].string() + ") has shape (" +
                                 std::to_string(c.n()) + ", " + std::to_string(c.d()) +
                                 "), expected (" + std::to_string(layers.front().n()) + ", " +
                                 std::to_string(layers.front().d()) + ")",
                             j);
    }
    layers.push_back(std::move(c));
  }
  return LayerStack(std::move(layers));
}

}  // namespace idlab
