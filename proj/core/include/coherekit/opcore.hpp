#pragma once

// Validated complex-operator arithmetic: density matrices, local bases,
// tensor products, partial traces, canonical Hermitian eigendecomposition and
// the dephasing operation.

#include "coherekit/types.hpp"

#include <span>
#include <vector>

namespace coherekit {

/// Hermitian, unit-trace, positive semidefinite matrix together with its
/// subsystem dimensions. Immutable after construction.
class DensityMatrix {
 public:
  /// Wraps a matrix that is already known to be a density matrix (for
  /// example the image of a valid state under a channel). Only the shape is
  /// checked.
  static DensityMatrix assume_valid(Matrix m, Dims dims);

  const Matrix& matrix() const noexcept { return m_; }
  const Dims& dims() const noexcept { return dims_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  int parties() const noexcept { return static_cast<int>(dims_.size()); }

 private:
  DensityMatrix(Matrix m, Dims dims) : m_(std::move(m)), dims_(std::move(dims)) {}
  Matrix m_;
  Dims dims_;
};

/// Validates Hermiticity, trace and positivity at the module tolerances.
/// Small negative eigenvalues are clipped to zero and small trace drift is
/// renormalized; anything beyond tolerance throws ValidationError.
DensityMatrix validate_density(const Matrix& m, const Dims& dims);

/// Orthonormal basis of one subsystem; column k is |k>.
class LocalBasis {
 public:
  explicit LocalBasis(Matrix columns);
  static LocalBasis computational(int d);

  const Matrix& columns() const noexcept { return u_; }
  int dim() const noexcept { return static_cast<int>(u_.rows()); }
  bool is_computational() const noexcept { return computational_; }

 private:
  LocalBasis(Matrix u, bool computational) : u_(std::move(u)), computational_(computational) {}
  Matrix u_;
  bool computational_ = false;
};

using BasisList = std::vector<LocalBasis>;

BasisList computational_bases(const Dims& dims);

struct EigDecomposition {
  RealVector eigenvalues;  // descending
  Matrix eigenvectors;     // column k pairs with eigenvalues[k]
};

/// Hermitian eigendecomposition in canonical form: eigenvalues descending,
/// each eigenvector's largest-magnitude component real and positive, and
/// eigenvectors inside a degenerate cluster (gap <= 1e-10) ordered
/// lexicographically by (re, im) components. Bitwise deterministic.
EigDecomposition eig_hermitian(const Matrix& h);

/// Eigenvalues only, computed block by block on the exact sparsity pattern.
/// Sorted descending.
RealVector spectrum(const Matrix& h);

/// Eigenpairs with eigenvalue strictly above `threshold`, computed on the
/// connected blocks of the exact sparsity pattern. Columns are full length.
struct SpectralSupport {
  RealVector values;
  Matrix vectors;
};
SpectralSupport spectral_support(const Matrix& h, double threshold);

/// Kronecker product, (A (x) B)[(i,j),(i',j')] = A[i,i'] B[j,j'].
Matrix tensor(const Matrix& a, const Matrix& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
Matrix tensor_all(std::span<const Matrix> ops);

/// Marginal on the subsystems listed in `keep` (order of `keep` is ignored;
/// the result keeps the original left-to-right order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep);
Matrix partial_trace(const Matrix& m, const Dims& dims, std::vector<int> keep);

/// Applies `op` to subsystem `party` of every column of `m`:
/// m <- (I (x) op (x) I) m.
void apply_local_left(Matrix& m, const Dims& dims, int party, const Matrix& op);

/// (U_1 (x) ... (x) U_N)^dagger m (U_1 (x) ... (x) U_N) for the listed bases.
Matrix to_product_basis(const Matrix& m, const Dims& dims, const BasisList& bases);
/// Inverse of to_product_basis.
Matrix from_product_basis(const Matrix& m, const Dims& dims, const BasisList& bases);

/// Reorders subsystems: output subsystem k is input subsystem perm[k].
Matrix permute_subsystems(const Matrix& m, const Dims& dims, const std::vector<int>& perm);
Vector permute_subsystems(const Vector& v, const Dims& dims, const std::vector<int>& perm);

/// Pi(rho) = sum_i |i><i| rho |i><i| in the composite fixed basis.
DensityMatrix dephase(const DensityMatrix& rho, const BasisList& bases);

/// Dephases only the subsystems in `parties` (von Neumann measurement on
/// those subsystems); other subsystems are untouched.
Matrix dephase_parties(const Matrix& m, const Dims& dims, const BasisList& bases,
                       const std::vector<int>& parties);

/// Largest absolute entrywise difference.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Positive semidefinite square root and support-restricted inverse square
/// root (eigenvalues <= threshold map to zero).
Matrix psd_sqrt(const Matrix& h);
Matrix psd_inv_sqrt(const Matrix& h, double threshold);

}  // namespace coherekit
