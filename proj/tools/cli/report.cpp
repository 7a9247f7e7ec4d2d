#include "report.hpp"

#include <cmath>
#include <sstream>

namespace coherekit::cli {

Json entropy_json(const EntropyValue& v) {
  if (v.is_infinite()) return "inf";
  return v.value();
}

std::string number_text(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return Json(x).dump();
}

bool Report::passed() const {
  for (const auto& c : suite_results)
    if (!c.passed) return false;
  return true;
}

Json Report::to_json() const {
  Json j;
  j["command"] = command;
  j["inputs"] = inputs;
  j["seed"] = seed;
  Json vals = Json::array();
  for (const auto& v : values) {
    Json e;
    e["name"] = v.name;
    if (v.value) e["value"] = entropy_json(*v.value);
    if (v.number) e["value"] = std::isfinite(*v.number) ? Json(*v.number) : Json(number_text(*v.number));
    if (v.converged) e["converged"] = *v.converged;
    if (v.spread) e["spread"] = std::isfinite(*v.spread) ? Json(*v.spread) : Json(number_text(*v.spread));
    if (!v.flags.empty()) e["flags"] = v.flags;
    vals.push_back(std::move(e));
  }
  j["values"] = std::move(vals);
  Json suites = Json::array();
  for (const auto& c : suite_results) {
    suites.push_back(Json{{"check", c.name},
                          {"passed", c.passed},
                          {"cases", c.cases},
                          {"failures", c.failures},
                          {"skipped", c.skipped},
                          {"worst", c.worst},
                          {"tolerance", c.tolerance}});
  }
  j["suite_results"] = std::move(suites);
  if (!failures.empty()) j["failures"] = failures;
  if (command == "verify") j["passed"] = passed();
  if (wall_time) j["wall_time"] = *wall_time;
  return j;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string Report::render(const std::string& format) const {
  if (format == "json") return to_json().dump(2) + "\n";
  std::ostringstream os;
  os << "command,section,name,value,converged,spread,passed,cases,failures\n";
  for (const auto& v : values) {
    std::string value;
    if (v.value) value = v.value->is_infinite() ? "inf" : number_text(v.value->value());
    if (v.number) value = number_text(*v.number);
    os << command << ",value," << csv_field(v.name) << ',' << value << ','
       << (v.converged ? (*v.converged ? "true" : "false") : "") << ',' << (v.spread ? number_text(*v.spread) : "")
       << ",,,\n";
  }
  for (const auto& c : suite_results) {
    os << command << ",check," << csv_field(c.name) << ',' << number_text(c.worst) << ",,,"
       << (c.passed ? "true" : "false") << ',' << c.cases << ',' << c.failures << '\n';
  }
  if (wall_time) os << command << ",timing,wall_time," << number_text(*wall_time) << ",,,,,\n";
  return os.str();
}

}  // namespace coherekit::cli
