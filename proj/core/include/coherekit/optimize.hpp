#pragma once

// Derivative-free minimization shared by every "min over" measure: optimizer
// configuration, per-restart seed derivation, adaptive Nelder-Mead and the
// exponential chart on the unitary group.

#include "coherekit/types.hpp"

#include <cstdint>
#include <functional>

namespace coherekit {

struct OptimizerConfig {
  int restarts = 32;
  int max_iters = 2000;
  double tol = 1e-8;
  std::uint64_t seed = 0;

  /// Throws ValidationError(InvalidConfig) unless restarts >= 1,
  /// max_iters >= 1 and tol > 0.
  void validate() const;
};

/// splitmix64 mix of (root, index). Restart k of any search seeds its RNG
/// with derive_seed(cfg.seed, k), so results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept;

using Objective = std::function<double(const RealVector&)>;

struct NelderMeadOptions {
  int max_iters = 2000;
  double tol = 1e-8;
  double initial_step = 0.5;
  int stall_window = 50;  // iterations without tol-improvement before a restart
  int max_rebuilds = 3;   // simplex re-initializations around the incumbent
};

struct NelderMeadResult {
  RealVector x;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Adaptive Nelder-Mead (dimension-dependent coefficients). Converged when
/// the best value improves by less than tol over stall_window iterations
/// after the last simplex rebuild.
NelderMeadResult nelder_mead(const Objective& f, const RealVector& x0, const NelderMeadOptions& opt);

/// Number of real parameters of the exponential chart on U(d).
inline int unitary_param_count(int d) { return d * d; }

/// Hermitian generator from d*d reals: d diagonal entries, then
/// (re, im) of each strict upper-triangular entry.
Matrix hermitian_from_params(const double* x, int d);

/// base * exp(i H(x)); x = 0 maps to base.
Matrix unitary_from_params(const Matrix& base, const double* x, int d);

/// Unitary closest to m (polar factor); used to scrub accumulated round-off.
Matrix nearest_unitary(const Matrix& m);

}  // namespace coherekit
