#include "coherekit/entropy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace coherekit {

namespace {
constexpr double kClampFloor = -1e-12;
// Relative entropy can come out slightly negative from cancellation.
constexpr double kRelativeClampFloor = -1e-10;
}  // namespace

EntropyValue EntropyValue::finite(double bits) {
  if (std::isnan(bits)) throw InternalError("entropy evaluated to NaN");
  if (std::isinf(bits)) {
    if (bits > 0) return infinity();
    throw InternalError("entropy evaluated to -inf");
  }
  if (bits < 0.0) {
    if (bits < kClampFloor) {
      std::ostringstream os;
      os << "negative entropy " << bits;
      throw InternalError(os.str());
    }
    bits = 0.0;
  }
  EntropyValue v;
  v.bits_ = bits;
  return v;
}

EntropyValue EntropyValue::infinity() noexcept {
  EntropyValue v;
  v.infinite_ = true;
  return v;
}

double EntropyValue::value() const {
  if (infinite_) throw InternalError("value() called on an infinite entropy");
  return bits_;
}

std::string EntropyValue::str() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << bits_;
  return os.str();
}

double shannon_bits(const RealVector& p) noexcept {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double x = p[i];
    if (x > 0.0) h -= x * std::log2(x);
  }
  return h;
}

EntropyValue shannon(const RealVector& p) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] >= -1e-12)) {
      throw ValidationError(Violation::InvalidDistribution, "probability entry below zero");
    }
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "probabilities sum to " << sum;
    throw ValidationError(Violation::InvalidDistribution, os.str());
  }
  return EntropyValue::finite(shannon_bits(p));
}

double von_neumann_bits(const Matrix& rho) { return shannon_bits(spectrum(rho)); }

EntropyValue von_neumann_entropy(const DensityMatrix& rho) {
  return EntropyValue::finite(von_neumann_bits(rho.matrix()));
}

double relative_entropy_bits(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw DimensionError("relative_entropy: operand sizes differ");
  }
  const SpectralSupport sup = spectral_support(sigma, kSupportEigenTol);
  double inside = 0.0;
  double cross = 0.0;  // Tr rho log2 sigma restricted to the support
  for (Eigen::Index k = 0; k < sup.values.size(); ++k) {
    const auto v = sup.vectors.col(k);
    const double w = (v.adjoint() * rho * v)(0, 0).real();
    inside += w;
    cross += w * std::log2(sup.values[k]);
  }
  const double outside = rho.trace().real() - inside;
  if (outside > kSupportMassTol) return std::numeric_limits<double>::infinity();
  const double neg_entropy = -von_neumann_bits(rho);
  return neg_entropy - cross;
}

EntropyValue relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dims() != sigma.dims()) throw DimensionError("relative_entropy: dims differ");
  double r = relative_entropy_bits(rho.matrix(), sigma.matrix());
  if (std::isinf(r)) return EntropyValue::infinity();
  if (r < 0.0 && r >= kRelativeClampFloor) r = 0.0;
  if (r < 0.0) {
    std::ostringstream os;
    os << "relative entropy " << r << " is negative beyond tolerance";
    throw InternalError(os.str());
  }
  return EntropyValue::finite(r);
}

}  // namespace coherekit
