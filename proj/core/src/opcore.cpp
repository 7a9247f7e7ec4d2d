#include "coherekit/opcore.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace coherekit {

const char* to_string(Violation v) {
  switch (v) {
    case Violation::NonSquare: return "non-square";
    case Violation::NonHermitian: return "non-hermitian";
    case Violation::NegativeEigenvalue: return "negative-eigenvalue";
    case Violation::TraceDeviation: return "trace-deviation";
    case Violation::NotUnitary: return "not-unitary";
    case Violation::NotUnitNorm: return "not-unit-norm";
    case Violation::InvalidDistribution: return "invalid-distribution";
    case Violation::NotMaximallyCorrelated: return "not-maximally-correlated";
    case Violation::SupportMismatch: return "support-mismatch";
    case Violation::SymmetryBroken: return "symmetry-broken";
    case Violation::InvalidConfig: return "invalid-config";
  }
  return "unknown";
}

int total_dim(const Dims& dims) {
  int d = 1;
  for (int k : dims) {
    if (k < 1) throw DimensionError("subsystem dimension must be positive");
    d *= k;
  }
  return d;
}

namespace {

// Eigenvalues below this magnitude are treated as eigensolver noise and are
// not worth rebuilding the matrix over.
constexpr double kClipRebuildFloor = 1e-13;
constexpr double kDegeneracyGap = 1e-10;
constexpr double kRenormFloor = 1e-14;

void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw ValidationError(Violation::NonSquare, std::string(who) + ": matrix is not square");
  }
}

double hermiticity_defect(const Matrix& m) {
  return m.rows() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Connected components of the graph i ~ j iff m(i,j) != 0 or m(j,i) != 0.
std::vector<std::vector<int>> coupled_blocks(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      if (m(i, j) != Complex(0.0, 0.0) || m(j, i) != Complex(0.0, 0.0)) {
        const int a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::vector<int>> blocks;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[r]].push_back(i);
  }
  return blocks;
}

Matrix sub_block(const Matrix& m, const std::vector<int>& idx) {
  const int k = static_cast<int>(idx.size());
  Matrix s(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) s(a, b) = m(idx[a], idx[b]);
  return s;
}

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return false;
}

void fix_phase(Eigen::Ref<Vector> v) {
  const double top = v.cwiseAbs().maxCoeff();
  if (top == 0.0) return;
  Eigen::Index pick = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= top * (1.0 - 1e-12)) {
      pick = i;
      break;
    }
  }
  const Complex phase = v[pick] / std::abs(v[pick]);
  v *= std::conj(phase);
  v[pick] = Complex(v[pick].real(), 0.0);
}

struct Strides {
  int left = 1;
  int d = 1;
  int right = 1;
};

Strides strides_for(const Dims& dims, int party) {
  if (party < 0 || party >= static_cast<int>(dims.size())) {
    throw DimensionError("subsystem index out of range");
  }
  Strides s;
  s.d = dims[party];
  for (int k = 0; k < party; ++k) s.left *= dims[k];
  for (int k = party + 1; k < static_cast<int>(dims.size()); ++k) s.right *= dims[k];
  return s;
}

void check_bases(const Dims& dims, const BasisList& bases) {
  if (bases.size() != dims.size()) {
    throw DimensionError("one local basis per subsystem is required");
  }
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (bases[k].dim() != dims[k]) throw DimensionError("basis dimension does not match subsystem");
  }
}

}  // namespace

DensityMatrix DensityMatrix::assume_valid(Matrix m, Dims dims) {
  if (m.rows() != m.cols()) throw ValidationError(Violation::NonSquare, "density matrix is not square");
  if (total_dim(dims) != m.rows()) throw DimensionError("dims do not multiply to matrix size");
  return DensityMatrix(std::move(m), std::move(dims));
}

DensityMatrix validate_density(const Matrix& m, const Dims& dims) {
  require_square(m, "validate_density");
  if (dims.empty() || total_dim(dims) != m.rows()) {
    throw DimensionError("dims do not multiply to matrix size");
  }
  const double defect = hermiticity_defect(m);
  if (defect > kHermitianTol) {
    std::ostringstream os;
    os << "matrix is not Hermitian (defect " << defect << ")";
    throw ValidationError(Violation::NonHermitian, os.str());
  }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os << "trace " << tr << " deviates from 1";
    throw ValidationError(Violation::TraceDeviation, os.str());
  }
  Matrix h = (m + m.adjoint()) * 0.5;
  const RealVector ev = spectrum(h);
  const double lowest = ev.size() ? ev.minCoeff() : 0.0;
  if (lowest < -kNegativityTol) {
    std::ostringstream os;
    os << "minimum eigenvalue " << lowest << " is negative";
    throw ValidationError(Violation::NegativeEigenvalue, os.str());
  }
  if (lowest < -kClipRebuildFloor) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const RealVector clipped = es.eigenvalues().cwiseMax(0.0);
    h = es.eigenvectors() * clipped.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  }
  // Renormalize only real drift so validated states are fixed points.
  const double t = h.trace().real();
  if (std::abs(t - 1.0) > kRenormFloor) h /= t;
  return DensityMatrix::assume_valid(std::move(h), dims);
}

LocalBasis::LocalBasis(Matrix columns) : u_(std::move(columns)) {
  require_square(u_, "LocalBasis");
  if (u_.rows() == 0) throw DimensionError("empty basis");
  const Matrix gram = u_.adjoint() * u_;
  const double defect = (gram - Matrix::Identity(u_.rows(), u_.cols())).cwiseAbs().maxCoeff();
  if (defect > kUnitaryTol) {
    std::ostringstream os;
    os << "basis is not orthonormal (defect " << defect << ")";
    throw ValidationError(Violation::NotUnitary, os.str());
  }
  computational_ = u_.isIdentity(0.0);
}

LocalBasis LocalBasis::computational(int d) {
  if (d < 1) throw DimensionError("basis dimension must be positive");
  return LocalBasis(Matrix::Identity(d, d), true);
}

BasisList computational_bases(const Dims& dims) {
  BasisList out;
  out.reserve(dims.size());
  for (int d : dims) out.push_back(LocalBasis::computational(d));
  return out;
}

EigDecomposition eig_hermitian(const Matrix& h) {
  require_square(h, "eig_hermitian");
  const double defect = hermiticity_defect(h);
  if (defect > 1e-8) {
    std::ostringstream os;
    os << "eig_hermitian: input is not Hermitian (defect " << defect << ")";
    throw ValidationError(Violation::NonHermitian, os.str());
  }
  const Eigen::Index n = h.rows();
  EigDecomposition out;
  if (n == 0) return out;
  const Matrix sym = (h + h.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = es.eigenvectors().rowwise().reverse();
  for (Eigen::Index k = 0; k < n; ++k) fix_phase(out.eigenvectors.col(k));

  // Clusters of (numerically) equal eigenvalues: average the values and
  // order the vectors lexicographically.
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && out.eigenvalues[stop - 1] - out.eigenvalues[stop] <= kDegeneracyGap) ++stop;
    if (stop - start > 1) {
      const double mean = out.eigenvalues.segment(start, stop - start).mean();
      out.eigenvalues.segment(start, stop - start).setConstant(mean);
      std::vector<Vector> cols;
      for (Eigen::Index k = start; k < stop; ++k) cols.emplace_back(out.eigenvectors.col(k));
      std::stable_sort(cols.begin(), cols.end(), lex_less);
      for (Eigen::Index k = start; k < stop; ++k) out.eigenvectors.col(k) = cols[k - start];
    }
    start = stop;
  }
  return out;
}

RealVector spectrum(const Matrix& h) {
  require_square(h, "spectrum");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(h.rows()));
  for (const auto& block : coupled_blocks(h)) {
    if (block.size() == 1) {
      values.push_back(h(block[0], block[0]).real());
      continue;
    }
    const Matrix s = sub_block(h, block);
    Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) values.push_back(es.eigenvalues()[k]);
  }
  std::sort(values.begin(), values.end(), std::greater<>());
  return Eigen::Map<RealVector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

SpectralSupport spectral_support(const Matrix& h, double threshold) {
  require_square(h, "spectral_support");
  const Eigen::Index n = h.rows();
  std::vector<double> values;
  std::vector<Vector> vectors;
  for (const auto& block : coupled_blocks(h)) {
    if (block.size() == 1) {
      const double v = h(block[0], block[0]).real();
      if (v > threshold) {
        values.push_back(v);
        Vector e = Vector::Zero(n);
        e[block[0]] = 1.0;
        vectors.push_back(std::move(e));
      }
      continue;
    }
    const Matrix s = sub_block(h, block);
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      if (es.eigenvalues()[k] <= threshold) continue;
      values.push_back(es.eigenvalues()[k]);
      Vector e = Vector::Zero(n);
      for (std::size_t a = 0; a < block.size(); ++a) e[block[a]] = es.eigenvectors()(static_cast<Eigen::Index>(a), k);
      vectors.push_back(std::move(e));
    }
  }
  SpectralSupport out;
  out.values.resize(static_cast<Eigen::Index>(values.size()));
  out.vectors.resize(n, static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) {
    out.values[static_cast<Eigen::Index>(k)] = values[k];
    out.vectors.col(static_cast<Eigen::Index>(k)) = vectors[k];
  }
  return out;
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out = Eigen::kroneckerProduct(a, b);
  return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityMatrix::assume_valid(tensor(a.matrix(), b.matrix()), std::move(dims));
}

Matrix tensor_all(std::span<const Matrix> ops) {
  Matrix out = Matrix::Identity(1, 1);
  for (const Matrix& op : ops) out = tensor(out, op);
  return out;
}

Matrix partial_trace(const Matrix& m, const Dims& dims, std::vector<int> keep) {
  const int parties = static_cast<int>(dims.size());
  if (total_dim(dims) != m.rows() || m.rows() != m.cols()) {
    throw DimensionError("partial_trace: dims do not match operator size");
  }
  std::sort(keep.begin(), keep.end());
  if (keep.empty() || std::adjacent_find(keep.begin(), keep.end()) != keep.end() ||
      keep.front() < 0 || keep.back() >= parties) {
    throw DimensionError("partial_trace: invalid keep set");
  }
  std::vector<bool> kept(parties, false);
  for (int k : keep) kept[k] = true;

  // Split every composite index into (kept index, traced index).
  const int n = static_cast<int>(m.rows());
  int dk = 1;
  for (int k : keep) dk *= dims[k];
  const int dt = n / dk;
  std::vector<int> full_of(n);  // (kept * dt + traced) -> composite
  std::vector<int> digits(parties);
  for (int idx = 0; idx < n; ++idx) {
    int rem = idx;
    for (int p = parties - 1; p >= 0; --p) {
      digits[p] = rem % dims[p];
      rem /= dims[p];
    }
    int ki = 0, ti = 0;
    for (int p = 0; p < parties; ++p) {
      if (kept[p]) ki = ki * dims[p] + digits[p];
      else ti = ti * dims[p] + digits[p];
    }
    full_of[ki * dt + ti] = idx;
  }
  Matrix out = Matrix::Zero(dk, dk);
  for (int a = 0; a < dk; ++a) {
    for (int b = 0; b < dk; ++b) {
      Complex acc(0.0, 0.0);
      for (int t = 0; t < dt; ++t) acc += m(full_of[a * dt + t], full_of[b * dt + t]);
      out(a, b) = acc;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep) {
  std::sort(keep.begin(), keep.end());
  Matrix out = partial_trace(rho.matrix(), rho.dims(), keep);
  Dims dims;
  for (int k : keep) dims.push_back(rho.dims()[k]);
  return DensityMatrix::assume_valid(std::move(out), std::move(dims));
}

void apply_local_left(Matrix& m, const Dims& dims, int party, const Matrix& op) {
  const Strides s = strides_for(dims, party);
  if (op.rows() != s.d || op.cols() != s.d) throw DimensionError("local operator has wrong size");
  if (m.rows() != s.left * s.d * s.right) throw DimensionError("operand does not match dims");
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor scratch(s.d, s.right);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Complex* col = m.col(c).data();
    for (int l = 0; l < s.left; ++l) {
      Eigen::Map<RowMajor> slab(col + static_cast<std::ptrdiff_t>(l) * s.d * s.right, s.d, s.right);
      scratch.noalias() = op * slab;
      slab = scratch;
    }
  }
}

Matrix to_product_basis(const Matrix& m, const Dims& dims, const BasisList& bases) {
  check_bases(dims, bases);
  Matrix out = m;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (bases[k].is_computational()) continue;
    apply_local_left(out, dims, static_cast<int>(k), bases[k].columns().adjoint());
  }
  out.adjointInPlace();
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (bases[k].is_computational()) continue;
    apply_local_left(out, dims, static_cast<int>(k), bases[k].columns().adjoint());
  }
  out.adjointInPlace();
  return out;
}

Matrix from_product_basis(const Matrix& m, const Dims& dims, const BasisList& bases) {
  check_bases(dims, bases);
  Matrix out = m;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (bases[k].is_computational()) continue;
    apply_local_left(out, dims, static_cast<int>(k), bases[k].columns());
  }
  out.adjointInPlace();
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (bases[k].is_computational()) continue;
    apply_local_left(out, dims, static_cast<int>(k), bases[k].columns());
  }
  out.adjointInPlace();
  return out;
}

namespace {

std::vector<int> permutation_map(const Dims& dims, const std::vector<int>& perm) {
  const int parties = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != parties) throw DimensionError("permutation has wrong length");
  std::vector<int> check = perm;
  std::sort(check.begin(), check.end());
  for (int k = 0; k < parties; ++k) {
    if (check[k] != k) throw DimensionError("not a permutation of subsystems");
  }
  Dims out_dims(parties);
  for (int k = 0; k < parties; ++k) out_dims[k] = dims[perm[k]];
  const int n = total_dim(dims);
  std::vector<int> map(n);  // input composite -> output composite
  std::vector<int> digits(parties);
  for (int idx = 0; idx < n; ++idx) {
    int rem = idx;
    for (int p = parties - 1; p >= 0; --p) {
      digits[p] = rem % dims[p];
      rem /= dims[p];
    }
    int o = 0;
    for (int k = 0; k < parties; ++k) o = o * out_dims[k] + digits[perm[k]];
    map[idx] = o;
  }
  return map;
}

}  // namespace

Matrix permute_subsystems(const Matrix& m, const Dims& dims, const std::vector<int>& perm) {
  const std::vector<int> map = permutation_map(dims, perm);
  const int n = static_cast<int>(map.size());
  if (m.rows() != n || m.cols() != n) throw DimensionError("operator does not match dims");
  Matrix out(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out(map[i], map[j]) = m(i, j);
  return out;
}

Vector permute_subsystems(const Vector& v, const Dims& dims, const std::vector<int>& perm) {
  const std::vector<int> map = permutation_map(dims, perm);
  if (v.size() != static_cast<Eigen::Index>(map.size())) throw DimensionError("vector does not match dims");
  Vector out(v.size());
  for (std::size_t i = 0; i < map.size(); ++i) out[map[i]] = v[static_cast<Eigen::Index>(i)];
  return out;
}

Matrix dephase_parties(const Matrix& m, const Dims& dims, const BasisList& bases,
                       const std::vector<int>& parties) {
  check_bases(dims, bases);
  const int n = total_dim(dims);
  if (m.rows() != n || m.cols() != n) throw DimensionError("operator does not match dims");
  const int np = static_cast<int>(dims.size());
  std::vector<bool> measured(np, false);
  for (int p : parties) {
    if (p < 0 || p >= np) throw DimensionError("measured subsystem out of range");
    measured[p] = true;
  }
  // Rotate only the measured subsystems, then keep entries whose measured
  // digits agree between row and column.
  BasisList rot;
  for (int p = 0; p < np; ++p) rot.push_back(measured[p] ? bases[p] : LocalBasis::computational(dims[p]));
  Matrix r = to_product_basis(m, dims, rot);
  std::vector<int> key(n, 0);
  std::vector<int> digits(np);
  for (int idx = 0; idx < n; ++idx) {
    int rem = idx;
    for (int p = np - 1; p >= 0; --p) {
      digits[p] = rem % dims[p];
      rem /= dims[p];
    }
    int kv = 0;
    for (int p = 0; p < np; ++p)
      if (measured[p]) kv = kv * dims[p] + digits[p];
    key[idx] = kv;
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (key[i] != key[j]) r(i, j) = Complex(0.0, 0.0);
  return from_product_basis(r, dims, rot);
}

DensityMatrix dephase(const DensityMatrix& rho, const BasisList& bases) {
  std::vector<int> all(rho.dims().size());
  std::iota(all.begin(), all.end(), 0);
  return DensityMatrix::assume_valid(dephase_parties(rho.matrix(), rho.dims(), bases, all), rho.dims());
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("max_abs_diff: shape mismatch");
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

Matrix psd_sqrt(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) * 0.5);
  const RealVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

Matrix psd_inv_sqrt(const Matrix& h, double threshold) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) * 0.5);
  RealVector s = es.eigenvalues();
  for (Eigen::Index k = 0; k < s.size(); ++k) s[k] = s[k] > threshold ? 1.0 / std::sqrt(s[k]) : 0.0;
  return es.eigenvectors() * s.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace coherekit
