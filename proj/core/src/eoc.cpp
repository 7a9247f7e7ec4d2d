#include "coherekit/eoc.hpp"

#include "coherekit/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace coherekit {

namespace {

constexpr double kDegenerateGap = 1e-8;

Dims four_party(const ExtensionPartition& p) { return {p.da, p.da_ext, p.db, p.db_ext}; }

// Completes the pairs (e_k, f_k) with the leftover columns in order.
struct PairedBases {
  std::vector<Vector> e;
  std::vector<Vector> f;
};

Matrix columns_to_matrix(const std::vector<Vector>& cols) {
  Matrix m(cols.front().size(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = cols[k];
  return m;
}

Vector embed(const Vector& local, int d_ext, int slot) {
  Vector v = Vector::Zero(local.size() * d_ext);
  for (Eigen::Index a = 0; a < local.size(); ++a) v[a * d_ext + slot] = local[a];
  return v;
}

ExtensionWitness make_witness(Matrix state, const ExtensionPartition& p, const Matrix& e, const Matrix& f,
                              Matrix original) {
  const int dx = p.da * p.da_ext;
  const int dy = p.db * p.db_ext;
  return ExtensionWitness{DensityMatrix::assume_valid(std::move(state), {dx, dy}),
                          p,
                          LocalBasis(e),
                          LocalBasis(f),
                          e * f.adjoint(),
                          f * e.adjoint(),
                          std::move(original)};
}

// max |V V^dagger - W W^dagger| without forming anything larger than needed.
double gram_gap(const Matrix& v, const Matrix& w) {
  const Matrix diff = v * v.adjoint() - w * w.adjoint();
  return diff.size() ? diff.cwiseAbs().maxCoeff() : 0.0;
}

Matrix permutation_matrix(const Dims& dims, const std::vector<int>& perm) {
  const int n = total_dim(dims);
  Matrix p(n, n);
  for (int i = 0; i < n; ++i) p.col(i) = permute_subsystems(Vector(Vector::Unit(n, i)), dims, perm);
  return p;
}

}  // namespace

ExtensionWitness delta_extension(const PureEnsemble& ensemble) {
  if (ensemble.dims.size() != 2) throw DimensionError("delta_extension needs a bipartite ensemble");
  const int da = ensemble.dims[0], db = ensemble.dims[1];
  const int n = static_cast<int>(ensemble.size());
  for (const Vector& v : ensemble.states) {
    if (std::abs(v.norm() - 1.0) > 1e-10) {
      throw ValidationError(Violation::NotUnitNorm, "Schmidt decomposition needs unit vectors");
    }
  }
  const int l = std::lcm(da, db);
  const int big = n * l;
  const ExtensionPartition part{da, big / da, db, big / db};
  const int s = std::min(da, db);

  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(big) * big, n);
  PairedBases paired, rest;
  for (int i = 0; i < n; ++i) {
    const SchmidtDecomposition sd = schmidt(ensemble.states[i], da, db);
    const double amp = std::sqrt(ensemble.weights[i]);
    for (int j = 0; j < s; ++j) {
      const Vector ex = embed(sd.a_vectors.col(j), part.da_ext, i);
      const Vector fy = embed(sd.b_vectors.col(j), part.db_ext, i);
      w.col(i) += (amp * sd.coefficients[j]) * tensor(Matrix(ex), Matrix(fy)).col(0);
      paired.e.push_back(ex);
      paired.f.push_back(fy);
    }
    for (int j = s; j < da; ++j) rest.e.push_back(embed(sd.a_vectors.col(j), part.da_ext, i));
    for (int j = s; j < db; ++j) rest.f.push_back(embed(sd.b_vectors.col(j), part.db_ext, i));
  }
  for (int i = n; i < part.da_ext; ++i)
    for (int j = 0; j < da; ++j) rest.e.push_back(embed(ket(da, j), part.da_ext, i));
  for (int i = n; i < part.db_ext; ++i)
    for (int j = 0; j < db; ++j) rest.f.push_back(embed(ket(db, j), part.db_ext, i));
  paired.e.insert(paired.e.end(), rest.e.begin(), rest.e.end());
  paired.f.insert(paired.f.end(), rest.f.begin(), rest.f.end());

  Matrix state = w * w.adjoint();
  return make_witness(std::move(state), part, columns_to_matrix(paired.e), columns_to_matrix(paired.f),
                      ensemble.reconstruct());
}

ExtensionWitness trivial_extension(const DensityMatrix& rho) {
  if (rho.parties() != 2) throw DimensionError("trivial_extension needs a bipartite state");
  const int da = rho.dims()[0], db = rho.dims()[1];
  const int l = std::lcm(da, db);
  const ExtensionPartition part{da, l / da, db, l / db};
  Matrix state = Matrix::Zero(static_cast<Eigen::Index>(l) * l, static_cast<Eigen::Index>(l) * l);
  auto idx = [&](int a, int b) { return static_cast<Eigen::Index>(a * part.da_ext) * l + b * part.db_ext; };
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < db; ++b)
      for (int a2 = 0; a2 < da; ++a2)
        for (int b2 = 0; b2 < db; ++b2) state(idx(a, b), idx(a2, b2)) = rho.matrix()(a * db + b, a2 * db + b2);
  const Matrix rx = partial_trace(state, {l, l}, {0});
  const Matrix ry = partial_trace(state, {l, l}, {1});
  const Matrix e = eig_hermitian(rx).eigenvectors;
  const Matrix f = eig_hermitian(ry).eigenvectors;
  return make_witness(std::move(state), part, nearest_unitary(e), nearest_unitary(f), rho.matrix());
}

bool verify_unitary_symmetry(const ExtensionWitness& ext, double tol) {
  const ExtensionPartition& p = ext.partition;
  const int dx = p.da * p.da_ext, dy = p.db * p.db_ext;
  if (ext.state.dims() != Dims{dx, dy}) return false;
  if (dx != dy) return false;
  if (ext.original.rows() != p.da * p.db) return false;
  const Matrix& st = ext.state.matrix();

  const Matrix back = partial_trace(st, four_party(p), {0, 2});
  if (max_abs_diff(back, ext.original) > tol) return false;

  for (const Matrix* u : {&ext.swap_u_aa, &ext.swap_u_bb}) {
    if (u->rows() != dx || u->cols() != dx) return false;
    if ((u->adjoint() * *u - Matrix::Identity(dx, dx)).cwiseAbs().maxCoeff() > tol) return false;
  }
  const Matrix rx = partial_trace(st, {dx, dy}, {0});
  const Matrix ry = partial_trace(st, {dx, dy}, {1});
  for (const auto& [basis, marg] : {std::pair{&ext.eigenbasis_aa, &rx}, std::pair{&ext.eigenbasis_bb, &ry}}) {
    if (basis->dim() != dx) return false;
    Matrix m = basis->columns().adjoint() * *marg * basis->columns();
    m.diagonal().setZero();
    if (m.size() && m.cwiseAbs().maxCoeff() > tol) return false;
  }

  // Low-rank check: state = W W^dagger, rotated = V V^dagger.
  const SpectralSupport sup = spectral_support(st, 0.0);
  Matrix w = sup.vectors;
  for (Eigen::Index k = 0; k < sup.values.size(); ++k) w.col(k) *= std::sqrt(sup.values[k]);
  Matrix v(w.rows(), w.cols());
  for (Eigen::Index k = 0; k < w.cols(); ++k) v.col(k) = permute_subsystems(Vector(w.col(k)), {dx, dy}, {1, 0});
  apply_local_left(v, {dx, dy}, 0, ext.swap_u_aa);
  apply_local_left(v, {dx, dy}, 1, ext.swap_u_bb);
  return gram_gap(v, w) <= tol;
}

EntropyValue cc_of_extension(const ExtensionWitness& ext) {
  if (!verify_unitary_symmetry(ext, 1e-9)) {
    throw ValidationError(Violation::SymmetryBroken, "extension witness is not unitarily symmetric");
  }
  const BasisList bases{ext.eigenbasis_aa, ext.eigenbasis_bb};
  const CorrelatedCoherenceEvaluator cc(ext.state);
  const double correlated = cc(bases);
  const double total = coherence_re(ext.state, bases).value();
  if (std::abs(correlated - total) > 1e-9) {
    std::ostringstream os;
    os << "extension correlated coherence " << correlated << " differs from total coherence " << total;
    throw InternalError(os.str());
  }
  return clamp_correlated(correlated);
}

std::vector<ExtensionWitness> degenerate_rotations(const ExtensionWitness& ext, int count, Rng& rng) {
  const int dx = ext.state.dims()[0];
  const Matrix rx = partial_trace(ext.state.matrix(), ext.state.dims(), {0});
  const Matrix& e = ext.eigenbasis_aa.columns();
  const Matrix& f = ext.eigenbasis_bb.columns();
  RealVector lam(dx);
  for (int k = 0; k < dx; ++k) lam[k] = (e.col(k).adjoint() * rx * e.col(k))(0, 0).real();

  // Clusters of equal nonzero eigenvalues, in stored column order.
  std::vector<std::vector<int>> clusters;
  std::vector<bool> used(dx, false);
  for (int k = 0; k < dx; ++k) {
    if (used[k] || lam[k] <= kSupportEigenTol) continue;
    std::vector<int> c{k};
    used[k] = true;
    for (int m = k + 1; m < dx; ++m) {
      if (!used[m] && std::abs(lam[m] - lam[k]) < kDegenerateGap) {
        c.push_back(m);
        used[m] = true;
      }
    }
    if (c.size() > 1) clusters.push_back(std::move(c));
  }
  std::vector<ExtensionWitness> out;
  if (clusters.empty()) return out;
  for (int t = 0; t < count; ++t) {
    Matrix rot = Matrix::Identity(dx, dx);
    for (const auto& c : clusters) {
      const Matrix r = haar_unitary(static_cast<int>(c.size()), rng);
      for (std::size_t x = 0; x < c.size(); ++x)
        for (std::size_t y = 0; y < c.size(); ++y) rot(c[x], c[y]) = r(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    }
    ExtensionWitness w = ext;
    w.eigenbasis_aa = LocalBasis(nearest_unitary(e * rot));
    w.eigenbasis_bb = LocalBasis(nearest_unitary(f * rot));
    out.push_back(std::move(w));
  }
  return out;
}

ExtensionWitness tensor_extension(const ExtensionWitness& e1, const ExtensionWitness& e2) {
  const ExtensionPartition& p1 = e1.partition;
  const ExtensionPartition& p2 = e2.partition;
  const int dx1 = p1.da * p1.da_ext, dx2 = p2.da * p2.da_ext;
  const int dy1 = p1.db * p1.db_ext, dy2 = p2.db * p2.db_ext;
  // X1 Y1 X2 Y2 -> X1 X2 Y1 Y2, then each X1 X2 = A1 A1' A2 A2' -> A1 A2 A1' A2'.
  const Matrix joint = permute_subsystems(tensor(e1.state.matrix(), e2.state.matrix()), {dx1, dy1, dx2, dy2}, {0, 2, 1, 3});
  const Dims fine{p1.da, p1.da_ext, p2.da, p2.da_ext, p1.db, p1.db_ext, p2.db, p2.db_ext};
  const std::vector<int> reorder{0, 2, 1, 3, 4, 6, 5, 7};
  const Matrix state = permute_subsystems(joint, fine, reorder);

  const Dims xfine{p1.da, p1.da_ext, p2.da, p2.da_ext};
  const Dims yfine{p1.db, p1.db_ext, p2.db, p2.db_ext};
  const std::vector<int> local_reorder{0, 2, 1, 3};
  const Matrix px = permutation_matrix(xfine, local_reorder);
  const Matrix py = permutation_matrix(yfine, local_reorder);
  const Matrix e = px * tensor(e1.eigenbasis_aa.columns(), e2.eigenbasis_aa.columns());
  const Matrix f = py * tensor(e1.eigenbasis_bb.columns(), e2.eigenbasis_bb.columns());
  const Matrix ux = px * tensor(e1.swap_u_aa, e2.swap_u_aa) * px.adjoint();
  const Matrix uy = py * tensor(e1.swap_u_bb, e2.swap_u_bb) * py.adjoint();
  const Matrix original = permute_subsystems(tensor(e1.original, e2.original), {p1.da, p1.db, p2.da, p2.db}, {0, 2, 1, 3});

  const ExtensionPartition part{p1.da * p2.da, p1.da_ext * p2.da_ext, p1.db * p2.db, p1.db_ext * p2.db_ext};
  return ExtensionWitness{DensityMatrix::assume_valid(state, {dx1 * dx2, dy1 * dy2}),
                          part,
                          LocalBasis(e),
                          LocalBasis(f),
                          ux,
                          uy,
                          original};
}

namespace {

int total_extension_dim(const PureEnsemble& e) {
  const int big = static_cast<int>(e.size()) * std::lcm(e.dims[0], e.dims[1]);
  return big * big;
}

struct Candidate {
  std::string label;
  double value = 0.0;
  ExtensionWitness witness;
};

}  // namespace

BoundsReport eoc_upper_bound(const DensityMatrix& rho, const OptimizerConfig& cfg, const EocOptions& opts) {
  cfg.validate();
  if (rho.parties() != 2) throw DimensionError("eoc_upper_bound needs a bipartite state");
  if (rho.dim() > 16) throw DimensionError("eoc_upper_bound is limited to total dimension 16");
  BoundsReport rep;
  const EofResult eof = eof_numeric(rho, cfg, opts.eof_ensemble_size);
  rep.eof_converged = eof.converged;
  rep.eof_spread = eof.spread;
  rep.e_f = rho.dims() == Dims{2, 2} ? eof_two_qubit(rho) : eof.value;

  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::string& label, double v) {
    ++rep.candidates_evaluated;
    if (v < best) {
      best = v;
      rep.best_candidate = label;
    }
  };

  const ExtensionWitness trivial = trivial_extension(rho);
  rep.trivial_symmetric = verify_unitary_symmetry(trivial, 1e-9);
  if (rep.trivial_symmetric) {
    const double base = cc_of_extension(trivial).value();
    consider("trivial", base);
    Rng rng(derive_seed(cfg.seed, 0x7269));
    const auto variants = degenerate_rotations(trivial, opts.degenerate_rotations, rng);
    rep.degenerate = !variants.empty();
    double lo = base, hi = base;
    for (const auto& w : variants) {
      if (!verify_unitary_symmetry(w, 1e-9)) continue;
      const double v = cc_of_extension(w).value();
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      consider("trivial", v);
    }
    rep.degenerate_spread = hi - lo;
  }

  auto try_delta = [&](const std::string& label, const PureEnsemble& e) {
    if (total_extension_dim(e) > opts.max_extension_dim) {
      ++rep.candidates_skipped;
      return;
    }
    consider(label, cc_of_extension(delta_extension(e)).value());
  };
  const int rank = static_cast<int>(eigen_ensemble(rho).size());
  const PureEnsemble eof_members = compress_ensemble(eof.argmin);
  if (total_extension_dim(eof_members) <= opts.max_extension_dim) {
    try_delta("delta-eof", eof_members);
  } else {
    // Largest ensemble whose extension still fits under the cap.
    const int lcm = std::lcm(rho.dims()[0], rho.dims()[1]);
    const int k_cap = static_cast<int>(std::sqrt(static_cast<double>(opts.max_extension_dim))) / lcm;
    if (k_cap >= rank) {
      try_delta("delta-eof", compress_ensemble(eof_numeric(rho, cfg, k_cap).argmin));
    } else {
      ++rep.candidates_skipped;
    }
  }
  try_delta("delta-eigen", eigen_ensemble(rho));
  for (int t = 0; t < opts.random_candidates; ++t) {
    Rng rng(derive_seed(cfg.seed ^ 0x52414e44ULL, static_cast<std::uint64_t>(t)));
    try_delta("delta-random", random_feasible_ensemble(rho, rank, rng));
  }
  if (std::isfinite(best)) {
    rep.eoc_upper = EntropyValue::finite(best);
  } else {
    rep.eoc_upper = EntropyValue::infinity();
    rep.best_candidate = "none";
  }

  const EreResult ere = ere_numeric(rho, cfg, opts.ere_ensemble_size, {schmidt_dephased(eof.argmin)});
  rep.e_re_lower = ere.value;
  rep.ere_converged = ere.converged;
  rep.ere_spread = ere.spread;

  const double tol = opts.ordering_tol;
  auto le = [tol](const EntropyValue& a, const EntropyValue& b) {
    if (a.is_infinite() || b.is_infinite()) return a <= b;
    return a.value() <= b.value() + tol;
  };
  rep.ordering_ok = le(rep.e_re_lower, rep.eoc_upper) && le(rep.eoc_upper, rep.e_f);
  return rep;
}

namespace {

std::vector<Candidate> subadditivity_candidates(const DensityMatrix& rho, const OptimizerConfig& cfg) {
  std::vector<Candidate> out;
  ExtensionWitness trivial = trivial_extension(rho);
  if (verify_unitary_symmetry(trivial, 1e-9)) {
    const double v = cc_of_extension(trivial).value();
    out.push_back({"trivial", v, std::move(trivial)});
  }
  auto add_delta = [&](const std::string& label, const PureEnsemble& e) {
    if (total_extension_dim(e) > 1024) return;
    ExtensionWitness w = delta_extension(e);
    const double v = cc_of_extension(w).value();
    out.push_back({label, v, std::move(w)});
  };
  add_delta("delta-eigen", eigen_ensemble(rho));
  if (rho.dim() <= 16) add_delta("delta-eof", compress_ensemble(eof_numeric(rho, cfg).argmin));
  return out;
}

}  // namespace

SubadditivityReport eoc_subadditivity_report(const DensityMatrix& rho, const DensityMatrix& tau,
                                             const OptimizerConfig& cfg) {
  cfg.validate();
  if (rho.parties() != 2 || tau.parties() != 2) throw DimensionError("subadditivity needs bipartite states");
  if (rho.dim() * tau.dim() > 36) throw DimensionError("combined dimension exceeds 36");
  const auto c1 = subadditivity_candidates(rho, cfg);
  const auto c2 = subadditivity_candidates(tau, cfg);
  const Candidate* best1 = nullptr;
  const Candidate* best2 = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : c1) {
    for (const auto& b : c2) {
      const long long dim = static_cast<long long>(a.witness.state.dim()) * b.witness.state.dim();
      if (dim > 1024) continue;
      if (a.value + b.value < best) {
        best = a.value + b.value;
        best1 = &a;
        best2 = &b;
      }
    }
  }
  if (!best1) throw DimensionError("no candidate pair fits the tensor extension dimension limit");
  const ExtensionWitness joint = tensor_extension(best1->witness, best2->witness);
  SubadditivityReport rep;
  rep.first = best1->value;
  rep.second = best2->value;
  rep.first_candidate = best1->label;
  rep.second_candidate = best2->label;
  rep.symmetric = verify_unitary_symmetry(joint, 1e-9);
  if (!rep.symmetric) return rep;
  rep.combined = cc_of_extension(joint).value();
  rep.passed = std::abs(rep.combined - (rep.first + rep.second)) <= 1e-8;
  return rep;
}

bool eoc_subadditivity_check(const DensityMatrix& rho, const DensityMatrix& tau, const OptimizerConfig& cfg) {
  return eoc_subadditivity_report(rho, tau, cfg).passed;
}

}  // namespace coherekit
