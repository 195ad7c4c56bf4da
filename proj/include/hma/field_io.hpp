// Bit-exact scalar-field serialization: one UTF-8 JSON header line
//   {"format_version": 1, "n": ..., "m": ..., "lo": [...], "hi": [...],
//    "field_name": "...", "dtype": "f64le", "layout": "row-major"}
// terminated by '\n', followed by exactly 8 * m^{2n} bytes of little-endian
// IEEE doubles in row-major axis order.  Reading back what was written
// reproduces the field bit for bit (NaN payloads included).
#pragma once

#include "hma/grid.hpp"

#include <stdexcept>
#include <string>

namespace hma {

// Error taxonomy: every reader failure is a FieldIoError; the subclasses
// distinguish malformed headers, unsupported versions, wrong payload
// encodings, and payloads of the wrong length.
struct FieldIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FieldHeaderError : FieldIoError {
  using FieldIoError::FieldIoError;
};
struct FieldVersionError : FieldIoError {
  using FieldIoError::FieldIoError;
};
struct FieldDtypeError : FieldIoError {
  using FieldIoError::FieldIoError;
};
struct FieldPayloadError : FieldIoError {
  using FieldIoError::FieldIoError;
};

void write_field(const ScalarField& f, const std::string& field_name, const std::string& path);

struct NamedField {
  ScalarField field;
  std::string name;
};
NamedField read_field(const std::string& path);

}  // namespace hma
