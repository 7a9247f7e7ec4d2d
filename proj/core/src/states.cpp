#include "coherekit/states.hpp"

#include <cmath>
#include <sstream>

namespace coherekit {

namespace {

Matrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

Matrix projector(const Vector& v) { return v * v.adjoint(); }

}  // namespace

Matrix haar_unitary(int d, Rng& rng) {
  if (d < 1) throw DimensionError("unitary dimension must be positive");
  const Matrix z = ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (int k = 0; k < d; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0.0) q.col(k) *= r(k, k) / a;
  }
  return q;
}

LocalBasis random_basis(int d, Rng& rng) { return LocalBasis(haar_unitary(d, rng)); }

BasisList random_bases(const Dims& dims, Rng& rng) {
  BasisList out;
  for (int d : dims) out.push_back(random_basis(d, rng));
  return out;
}

Vector random_pure_vector(const Dims& dims, Rng& rng) {
  Vector v = ginibre(total_dim(dims), 1, rng).col(0);
  return v / v.norm();
}

DensityMatrix pure_state(const Vector& psi, const Dims& dims) {
  if (total_dim(dims) != psi.size()) throw DimensionError("vector does not match dims");
  const double n = psi.norm();
  if (std::abs(n - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "state vector norm " << n << " is not 1";
    throw ValidationError(Violation::NotUnitNorm, os.str());
  }
  return validate_density(projector(psi / n), dims);
}

DensityMatrix random_pure_state(const Dims& dims, Rng& rng) {
  return pure_state(random_pure_vector(dims, rng), dims);
}

DensityMatrix random_mixed_state(const Dims& dims, Rng& rng, int rank) {
  const int d = total_dim(dims);
  if (rank <= 0 || rank > d) rank = d;
  const Matrix g = ginibre(d, rank, rng);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return validate_density(m, dims);
}

DensityMatrix maximally_mixed(const Dims& dims) {
  const int d = total_dim(dims);
  return validate_density(Matrix::Identity(d, d) / static_cast<double>(d), dims);
}

Vector ket(int d, int i) {
  if (i < 0 || i >= d) throw DimensionError("ket index out of range");
  Vector v = Vector::Zero(d);
  v[i] = 1.0;
  return v;
}

Vector plus_ket(int d, int i, int j) { return (ket(d, i) + ket(d, j)) / std::sqrt(2.0); }

namespace {

// (|0...0> + |1...1>)(<0...0| + <1...1|) / 2 with exact entries.
DensityMatrix cat_state(const Dims& dims) {
  const int d = total_dim(dims);
  Matrix m = Matrix::Zero(d, d);
  m(0, 0) = m(0, d - 1) = m(d - 1, 0) = m(d - 1, d - 1) = 0.5;
  return validate_density(m, dims);
}

}  // namespace

DensityMatrix bell_state() { return cat_state({2, 2}); }

DensityMatrix ghz_state(int n) {
  if (n < 2) throw DimensionError("GHZ needs at least two qubits");
  return cat_state(Dims(static_cast<std::size_t>(n), 2));
}

DensityMatrix paper_qutrit_example() {
  const Matrix a1 = 0.5 * projector(ket(3, 0)) + 0.5 * projector(plus_ket(3, 0, 1));
  const Matrix b1 = (2.0 / 3.0) * projector(ket(3, 0)) + (1.0 / 3.0) * projector(plus_ket(3, 0, 2));
  const Matrix m = 0.5 * tensor(a1, b1) + 0.5 * tensor(projector(ket(3, 2)), projector(ket(3, 1)));
  return validate_density(m, {3, 3});
}

}  // namespace coherekit
