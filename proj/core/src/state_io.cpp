#include "coherekit/state_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace coherekit {

using nlohmann::json;

namespace {

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("\"matrix\" must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  if (cols == 0) throw ParseError("matrix rows must be non-empty arrays");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError("matrix rows have inconsistent lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        m(r, c) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ParseError("matrix entries must be [re, im] pairs");
      }
    }
  }
  return m;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

Dims dims_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("\"dims\" must be a non-empty array");
  Dims dims;
  for (const json& d : j) {
    if (!d.is_number_integer()) throw ParseError("dims entries must be integers");
    dims.push_back(d.get<int>());
  }
  return dims;
}

}  // namespace

RawState parse_raw_state(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object()) throw ParseError("state file must be a JSON object");
  if (!j.contains("matrix")) throw ParseError("state file lacks \"matrix\"");
  RawState out;
  out.matrix = matrix_from_json(j.at("matrix"));
  if (j.contains("dims")) out.dims = dims_from_json(j.at("dims"));
  else out.dims = {static_cast<int>(out.matrix.rows())};
  return out;
}

DensityMatrix parse_state(const std::string& text) {
  const RawState raw = parse_raw_state(text);
  return validate_density(raw.matrix, raw.dims);
}

LocalBasis parse_basis(const std::string& text) {
  const RawState raw = parse_raw_state(text);
  if (raw.matrix.rows() != raw.matrix.cols()) {
    throw ValidationError(Violation::NonSquare, "basis matrix is not square");
  }
  return LocalBasis(raw.matrix);
}

std::string matrix_to_json(const Matrix& m, const Dims& dims) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  json j;
  j["dims"] = dims;
  j["matrix"] = std::move(rows);
  return j.dump();
}

std::string state_to_json(const DensityMatrix& rho) { return matrix_to_json(rho.matrix(), rho.dims()); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

DensityMatrix read_state_file(const std::string& path) { return parse_state(read_text_file(path)); }

LocalBasis read_basis_file(const std::string& path) { return parse_basis(read_text_file(path)); }

}  // namespace coherekit
