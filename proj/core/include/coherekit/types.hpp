#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace coherekit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Subsystem dimensions, left to right. Composite index of (i_1, ..., i_N) is
// row-major: ((i_1 * d_2 + i_2) * d_3 + i_3) ...
using Dims = std::vector<int>;

using Rng = std::mt19937_64;

// Tolerances shared across modules.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kNegativityTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kSupportEigenTol = 1e-12;
inline constexpr double kSupportMassTol = 1e-10;

enum class Violation {
  NonSquare,
  NonHermitian,
  NegativeEigenvalue,
  TraceDeviation,
  NotUnitary,
  NotUnitNorm,
  InvalidDistribution,
  NotMaximallyCorrelated,
  SupportMismatch,
  SymmetryBroken,
  InvalidConfig,
};

const char* to_string(Violation v);

/// Subsystem bookkeeping is inconsistent (wrong dims, bad subsystem index,
/// operator sizes that do not match).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-shaped but violates a mathematical precondition.
class ValidationError : public std::domain_error {
 public:
  ValidationError(Violation v, const std::string& what)
      : std::domain_error(what), violation_(v) {}
  Violation violation() const noexcept { return violation_; }

 private:
  Violation violation_;
};

/// A guaranteed identity failed beyond numerical noise. Indicates a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

int total_dim(const Dims& dims);

}  // namespace coherekit
