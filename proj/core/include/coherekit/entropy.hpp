#pragma once

// Shannon, von Neumann and quantum relative entropies, in bits.

#include "coherekit/opcore.hpp"

#include <string>

namespace coherekit {

/// Non-negative entropy in bits, or +infinity. Infinity is a distinct state,
/// never a floating-point sentinel, so comparisons are total.
class EntropyValue {
 public:
  EntropyValue() = default;
  /// Values in [-1e-12, 0) are clamped to 0; anything lower throws
  /// InternalError.
  static EntropyValue finite(double bits);
  static EntropyValue infinity() noexcept;

  bool is_infinite() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }
  /// Throws InternalError when infinite.
  double value() const;

  std::string str() const;

  friend bool operator==(const EntropyValue& a, const EntropyValue& b) noexcept {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.bits_ == b.bits_);
  }
  friend bool operator<(const EntropyValue& a, const EntropyValue& b) noexcept {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.bits_ < b.bits_;
  }
  friend bool operator<=(const EntropyValue& a, const EntropyValue& b) noexcept { return !(b < a); }
  friend bool operator>(const EntropyValue& a, const EntropyValue& b) noexcept { return b < a; }

 private:
  double bits_ = 0.0;
  bool infinite_ = false;
};

/// -sum p log2 p with 0 log 0 = 0. Entries must be >= -1e-12 and sum to
/// 1 +- 1e-10, otherwise ValidationError(InvalidDistribution).
EntropyValue shannon(const RealVector& p);

/// Same formula without distribution checks or clamping; negative entries
/// are ignored. For internal hot paths.
double shannon_bits(const RealVector& p) noexcept;

EntropyValue von_neumann_entropy(const DensityMatrix& rho);

/// Entropy of an already validated density operator given as a raw matrix.
double von_neumann_bits(const Matrix& rho);

/// S(rho || sigma) = Tr rho log rho - Tr rho log sigma, evaluated in sigma's
/// eigenbasis. +infinity when rho has more than 1e-10 mass outside the span
/// of sigma's eigenvectors with eigenvalue > 1e-12.
EntropyValue relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Raw-matrix form used internally; returns +inf as a double.
double relative_entropy_bits(const Matrix& rho, const Matrix& sigma);

}  // namespace coherekit
