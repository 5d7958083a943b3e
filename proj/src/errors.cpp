#include "idlab/errors.hpp"

namespace idlab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Format: return "FormatError";
    case ErrorKind::Shape: return "ShapeError";
    case ErrorKind::Data: return "DataError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Consistency: return "ConsistencyError";
    case ErrorKind::Parameter: return "ParameterError";
    case ErrorKind::Index: return "IndexError";
    case ErrorKind::Degenerate: return "DegenerateError";
    case ErrorKind::Inversion: return "InversionError";
    case ErrorKind::Sample: return "SampleError";
    case ErrorKind::Quality: return "QualityError";
    case ErrorKind::Registry: return "RegistryError";
    case ErrorKind::Empty: return "EmptyError";
    case ErrorKind::Schema: return "SchemaError";
  }
  return "Error";
}

}  // namespace idlab
