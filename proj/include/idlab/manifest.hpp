#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "idlab/point_cloud.hpp"

namespace idlab {

/// One extraction run: where the per-layer matrices and the token/NLL
/// streams live. Relative paths resolve against the manifest's directory.
struct RunManifest {
  std::string dataset_id;
  std::string model_id;
  std::vector<std::filesystem::path> layer_files;
  std::optional<std::filesystem::path> nll_file;
  std::optional<std::filesystem::path> token_file;
  std::uint64_t context_window = 1;
  std::uint64_t seed = 42;

  /// Throws SchemaError on missing fields, ParameterError on empty layer
  /// lists or a zero context window.
  void validate() const;
};

RunManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const RunManifest& manifest, const std::filesystem::path& path);

/// Loads the layers in manifest order.
LayerStack load_layer_stack(const RunManifest& manifest);

}  // namespace idlab
