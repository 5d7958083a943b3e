#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idlab/point_cloud.hpp"

namespace idlab::npy {

/// Parsed NPY v1.0 preamble.
struct Header {
  std::string descr;  // e.g. "<f8"
  bool fortran_order = false;
  std::vector<std::size_t> shape;
  std::size_t data_offset = 0;  // bytes before the payload
};

/// Parses magic, version, header length and the header dict. Throws
/// FormatError on any deviation from the v1.0 layout.
Header parse_header(std::string_view bytes);

/// Full preamble (magic through the terminating newline) for a little-endian
/// float64 C-order array, padded with spaces to a multiple of 64 bytes.
std::string make_header(std::span<const std::size_t> shape);

/// Reads a 2-D float32/float64 array into working precision. fortran_order
/// arrays are transposed so row i of the result is datapoint i.
PointCloud load_matrix(const std::filesystem::path& path);

void save_matrix(const PointCloud& cloud, const std::filesystem::path& path);

/// Writes a rows x cols row-major float64 array in a single pass over the
/// payload. Refuses empty shapes.
void save_array(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                std::span<const double> values);

/// Loads any 2-D float array without the finiteness check PointCloud applies.
struct Array {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
};
Array load_array(const std::filesystem::path& path);

}  // namespace idlab::npy

namespace idlab {
using npy::load_matrix;
using npy::save_matrix;
}  // namespace idlab
