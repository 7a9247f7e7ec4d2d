#pragma once

#include <coherekit/entropy.hpp>

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace coherekit::cli {

using Json = nlohmann::ordered_json;

struct MeasureValue {
  std::string name;
  std::optional<EntropyValue> value;  // entropies; +inf renders as "inf"
  std::optional<double> number;       // plain reals (gaps, residuals)
  std::optional<bool> converged;
  std::optional<double> spread;
  Json flags = Json::object();
};

struct CheckSummary {
  std::string name;
  bool passed = true;
  int cases = 0;
  int failures = 0;
  int skipped = 0;
  double worst = 0.0;  // largest residual seen
  double tolerance = 0.0;
};

/// One report per command. Field order is fixed, numbers use shortest
/// round-trip formatting, and wall_time is emitted only when set, so equal
/// inputs give byte-identical output.
struct Report {
  std::string command;
  Json inputs = Json::object();
  std::vector<MeasureValue> values;
  std::vector<CheckSummary> suite_results;
  Json failures = Json::array();
  std::uint64_t seed = 0;
  std::optional<double> wall_time;

  bool passed() const;
  Json to_json() const;
  std::string render(const std::string& format) const;
};

Json entropy_json(const EntropyValue& v);
std::string number_text(double x);

}  // namespace coherekit::cli
