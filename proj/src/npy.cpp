#include "idlab/npy.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>

#include "idlab/errors.hpp"

namespace idlab::npy {
namespace {

constexpr std::array<unsigned char, 6> kMagic = {0x93, 'N', 'U', 'M', 'P', 'Y'};
constexpr std::size_t kPreamble = 10;  // magic + version + u16 length

static_assert(std::endian::native == std::endian::little,
              "payload I/O assumes a little-endian host");

// Minimal parser for the Python dict literal numpy writes into the header.
class DictParser {
 public:
  explicit DictParser(std::string_view s) : s_(s) {}

  Header parse() {
    Header h;
    bool have_descr = false, have_order = false, have_shape = false;
    expect('{');
    for (;;) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      const std::string key = parse_string();
      expect(':');
      if (key == "descr") {
        h.descr = parse_string();
        have_descr = true;
      } else if (key == "fortran_order") {
        h.fortran_order = parse_bool();
        have_order = true;
      } else if (key == "shape") {
        h.shape = parse_tuple();
        have_shape = true;
      } else {
        throw FormatError("unexpected npy header key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != '}') {
        throw FormatError("malformed npy header dict");
      }
    }
    if (!have_descr || !have_order || !have_shape) {
      throw FormatError("npy header must contain descr, fortran_order and shape");
    }
    return h;
  }

 private:
  char peek() {
    if (pos_ >= s_.size()) throw FormatError("truncated npy header dict");
    return s_[pos_];
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) throw FormatError(std::string("npy header: expected '") + c + "'");
    ++pos_;
  }
  std::string parse_string() {
    skip_ws();
    const char q = peek();
    if (q != '\'' && q != '"') throw FormatError("npy header: expected quoted string");
    ++pos_;
    const auto end = s_.find(q, pos_);
    if (end == std::string_view::npos) throw FormatError("npy header: unterminated string");
    std::string out(s_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }
  bool parse_bool() {
    skip_ws();
    if (s_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    throw FormatError("npy header: fortran_order must be True or False");
  }
  std::vector<std::size_t> parse_tuple() {
    expect('(');
    std::vector<std::size_t> dims;
    for (;;) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        throw FormatError("npy header: shape entries must be non-negative integers");
      }
      std::size_t v = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        v = v * 10 + static_cast<std::size_t>(s_[pos_] - '0');
        ++pos_;
      }
      if (pos_ < s_.size() && s_[pos_] == 'L') ++pos_;
      dims.push_back(v);
      skip_ws();
      if (peek() == ',') ++pos_;
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

struct DType {
  std::size_t size;
  bool big_endian;
};

DType parse_descr(const std::string& descr) {
  if (descr.size() == 3 && (descr[0] == '<' || descr[0] == '>') && descr[1] == 'f' &&
      (descr[2] == '4' || descr[2] == '8')) {
    return {static_cast<std::size_t>(descr[2] - '0'), descr[0] == '>'};
  }
  throw FormatError("unsupported npy dtype '" + descr + "', expected <f4, <f8, >f4 or >f8");
}

Header read_header(std::ifstream& in, const std::filesystem::path& path) {
  std::array<char, kPreamble> pre{};
  if (!in.read(pre.data(), pre.size())) {
    throw FormatError("file too short for an npy header: " + path.string());
  }
  const auto hlen = static_cast<std::size_t>(static_cast<unsigned char>(pre[8])) |
                    (static_cast<std::size_t>(static_cast<unsigned char>(pre[9])) << 8);
  std::string bytes(pre.data(), pre.size());
  bytes.resize(kPreamble + hlen);
  if (!in.read(bytes.data() + kPreamble, static_cast<std::streamsize>(hlen))) {
    throw FormatError("truncated npy header: " + path.string());
  }
  return parse_header(bytes);
}

template <typename T>
void decode(const char* src, std::size_t count, bool swap, double* dst) {
  for (std::size_t i = 0; i < count; ++i) {
    std::array<char, sizeof(T)> raw;
    std::memcpy(raw.data(), src + i * sizeof(T), sizeof(T));
    if (swap) std::reverse(raw.begin(), raw.end());
    T v;
    std::memcpy(&v, raw.data(), sizeof(T));
    dst[i] = static_cast<double>(v);
  }
}

Array read_array(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const Header h = read_header(in, path);
  if (h.shape.size() != 2) {
    throw ShapeError("expected a 2-D array in " + path.string() + ", got rank " +
                     std::to_string(h.shape.size()));
  }
  const DType dt = parse_descr(h.descr);
  Array a;
  a.rows = h.shape[0];
  a.cols = h.shape[1];
  const std::size_t count = a.rows * a.cols;
  a.values.resize(count);

  if (dt.size == 8 && !dt.big_endian) {
    if (!in.read(reinterpret_cast<char*>(a.values.data()),
                 static_cast<std::streamsize>(count * 8))) {
      throw FormatError("truncated npy payload: " + path.string());
    }
  } else {
    constexpr std::size_t kChunk = 1 << 16;
    std::vector<char> buf(kChunk * dt.size);
    for (std::size_t done = 0; done < count;) {
      const std::size_t m = std::min(kChunk, count - done);
      if (!in.read(buf.data(), static_cast<std::streamsize>(m * dt.size))) {
        throw FormatError("truncated npy payload: " + path.string());
      }
      if (dt.size == 4) {
        decode<float>(buf.data(), m, dt.big_endian, a.values.data() + done);
      } else {
        decode<double>(buf.data(), m, dt.big_endian, a.values.data() + done);
      }
      done += m;
    }
  }

  if (h.fortran_order && a.rows > 1 && a.cols > 1) {
    std::vector<double> t(count);
    for (std::size_t j = 0; j < a.cols; ++j) {
      for (std::size_t i = 0; i < a.rows; ++i) t[i * a.cols + j] = a.values[j * a.rows + i];
    }
    a.values.swap(t);
  }
  return a;
}

}  // namespace

Header parse_header(std::string_view bytes) {
  if (bytes.size() < kPreamble ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin(),
                  [](unsigned char m, char b) { return m == static_cast<unsigned char>(b); })) {
    throw FormatError("missing npy magic string");
  }
  if (bytes[6] != 1 || bytes[7] != 0) {
    throw FormatError("unsupported npy version " + std::to_string(int(bytes[6])) + "." +
                      std::to_string(int(bytes[7])) + ", only 1.0 is accepted");
  }
  const auto hlen = static_cast<std::size_t>(static_cast<unsigned char>(bytes[8])) |
                    (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
  if (bytes.size() < kPreamble + hlen) throw FormatError("truncated npy header");
  const std::string_view dict = bytes.substr(kPreamble, hlen);
  if (dict.empty() || dict.back() != '\n') {
    throw FormatError("npy header must be terminated by a newline");
  }
  Header h = DictParser(dict).parse();
  h.data_offset = kPreamble + hlen;
  return h;
}

std::string make_header(std::span<const std::size_t> shape) {
  std::string dict = "{'descr': '<f8', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) dict += ", ";
    dict += std::to_string(shape[i]);
  }
  if (shape.size() == 1) dict += ",";
  dict += "), }";
  // Pad so the payload starts on a 64-byte boundary; the newline is the last
  // header byte.
  const std::size_t unpadded = kPreamble + dict.size() + 1;
  const std::size_t total = (unpadded + 63) / 64 * 64;
  dict.append(total - unpadded, ' ');
  dict += '\n';
  const std::size_t hlen = dict.size();
  if (hlen > 0xFFFF) throw FormatError("npy header too long for version 1.0");

  std::string out(reinterpret_cast<const char*>(kMagic.data()), kMagic.size());
  out += char(1);
  out += char(0);
  out += static_cast<char>(hlen & 0xFF);
  out += static_cast<char>((hlen >> 8) & 0xFF);
  out += dict;
  return out;
}

void save_array(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                std::span<const double> values) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("refusing to write an empty matrix to " + path.string());
  }
  if (values.size() != rows * cols) {
    throw ShapeError("payload size does not match shape for " + path.string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const std::array<std::size_t, 2> shape = {rows, cols};
  const std::string header = make_header(shape);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

void save_matrix(const PointCloud& cloud, const std::filesystem::path& path) {
  save_array(path, cloud.n(), cloud.d(), cloud.data());
}

Array load_array(const std::filesystem::path& path) { return read_array(path); }

PointCloud load_matrix(const std::filesystem::path& path) {
  Array a = read_array(path);
  if (a.rows == 0 || a.cols == 0) {
    throw ShapeError("empty matrix in " + path.string());
  }
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    if (!std::isfinite(a.values[k])) {
      const std::size_t r = k / a.cols;
      throw DataError("non-finite value in " + path.string() + " at row " + std::to_string(r),
                      r);
    }
  }
  return PointCloud(a.rows, a.cols, std::move(a.values));
}

}  // namespace idlab::npy
