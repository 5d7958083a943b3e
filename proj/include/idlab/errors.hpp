#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace idlab {

enum class ErrorKind {
  Format,
  Shape,
  Data,
  Io,
  Consistency,
  Parameter,
  Index,
  Degenerate,
  Inversion,
  Sample,
  Quality,
  Registry,
  Empty,
  Schema,
};

std::string_view to_string(ErrorKind kind);

/// Base of every error raised by the library. `index()` carries the
/// offending row or layer when the failure can be pinned to one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(what), kind_(kind), index_(index) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> index_;
};

template <ErrorKind K>
class KindError : public Error {
 public:
  explicit KindError(const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : Error(K, what, index) {}
};

using FormatError = KindError<ErrorKind::Format>;
using ShapeError = KindError<ErrorKind::Shape>;
using DataError = KindError<ErrorKind::Data>;
using IoError = KindError<ErrorKind::Io>;
using ConsistencyError = KindError<ErrorKind::Consistency>;
using ParameterError = KindError<ErrorKind::Parameter>;
using IndexError = KindError<ErrorKind::Index>;
using DegenerateError = KindError<ErrorKind::Degenerate>;
using InversionError = KindError<ErrorKind::Inversion>;
using SampleError = KindError<ErrorKind::Sample>;
using QualityError = KindError<ErrorKind::Quality>;
using RegistryError = KindError<ErrorKind::Registry>;
using EmptyError = KindError<ErrorKind::Empty>;
using SchemaError = KindError<ErrorKind::Schema>;

}  // namespace idlab
