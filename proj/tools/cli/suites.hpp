#pragma once

#include "report.hpp"

#include <coherekit/optimize.hpp>

#include <optional>
#include <string>
#include <vector>

namespace coherekit::cli {

struct SuiteOptions {
  int n = 100;
  std::uint64_t seed = 0;
  std::optional<double> tol;  // overrides each check's default tolerance
  OptimizerConfig cfg;        // for suites that run optimizers
};

const std::vector<std::string>& suite_names();

/// Runs a suite on n seeded items (item i uses derive_seed(seed, i)) and
/// fills suite_results plus a dump of the first failing cases. Throws
/// std::invalid_argument for an unknown suite name.
void run_suite(const std::string& name, const SuiteOptions& opts, Report& report);

}  // namespace coherekit::cli
