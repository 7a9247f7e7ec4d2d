#pragma once

// JSON state and basis files:
//   {"dims": [d1, ..., dN], "matrix": [[[re, im], ...], ...]}   (row-major)
// A basis file holds a unitary "matrix" whose columns are the basis vectors;
// "dims" is optional there.

#include "coherekit/opcore.hpp"

#include <stdexcept>
#include <string>

namespace coherekit {

/// Malformed file content (bad JSON, missing keys, ragged rows).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RawState {
  Dims dims;
  Matrix matrix;
};

/// Parses without validating the density-matrix conditions.
RawState parse_raw_state(const std::string& text);
/// Parses and validates; ValidationError / DimensionError propagate.
DensityMatrix parse_state(const std::string& text);
LocalBasis parse_basis(const std::string& text);

/// Canonical serialization; doubles use shortest round-trip formatting so a
/// written file parses back to a bit-identical matrix.
std::string state_to_json(const DensityMatrix& rho);
std::string matrix_to_json(const Matrix& m, const Dims& dims);

std::string read_text_file(const std::string& path);
DensityMatrix read_state_file(const std::string& path);
LocalBasis read_basis_file(const std::string& path);

}  // namespace coherekit
