#include "coherekit/structure.hpp"

#include "coherekit/discord.hpp"
#include "coherekit/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace coherekit {

namespace {

constexpr double kRankOneRatio = 1e-8;

std::vector<std::vector<int>> components(int n, const std::vector<bool>& active,
                                         const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : edges) {
    const int ra = find(a), rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<std::vector<int>> out;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    if (!active[i]) continue;
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[slot[r]].push_back(i);
  }
  return out;
}

Matrix rotate_in(const Matrix& m, const LocalBasis& b) { return b.columns().adjoint() * m * b.columns(); }
Matrix rotate_out(const Matrix& m, const LocalBasis& b) { return b.columns() * m * b.columns().adjoint(); }

Matrix embed_block(const Matrix& small, const IndexSet& idx, int d) {
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b)
      m(idx[a], idx[b]) = small(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  return m;
}

// Largest entry of m outside support x support.
double leakage(const Matrix& m, const IndexSet& support) {
  std::vector<bool> in(static_cast<std::size_t>(m.rows()), false);
  for (int i : support) in[i] = true;
  double worst = 0.0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (!in[r] || !in[c]) worst = std::max(worst, std::abs(m(r, c)));
  return worst;
}

bool pairwise_disjoint(const std::vector<IndexSet>& sets, int d) {
  std::vector<int> owner(d, -1);
  for (std::size_t k = 0; k < sets.size(); ++k) {
    for (int i : sets[k]) {
      if (i < 0 || i >= d || owner[i] >= 0) return false;
      owner[i] = static_cast<int>(k);
    }
  }
  return true;
}

}  // namespace

IndexSet coherence_support(const DensityMatrix& rho, const LocalBasis& basis, double tol) {
  if (rho.dim() != basis.dim()) throw DimensionError("basis does not match state");
  const Matrix r = rotate_in(rho.matrix(), basis);
  IndexSet out;
  for (int i = 0; i < rho.dim(); ++i)
    if (r(i, i).real() > tol) out.push_back(i);
  return out;
}

Matrix CCDecomposition::reconstruct() const {
  const int da = a_factors.empty() ? 0 : a_factors[0].dim();
  const int db = b_factors.empty() ? 0 : b_factors[0].dim();
  Matrix m = Matrix::Zero(da * db, da * db);
  for (Eigen::Index k = 0; k < weights.rows(); ++k)
    for (Eigen::Index l = 0; l < weights.cols(); ++l)
      if (weights(k, l) != 0.0) m += weights(k, l) * tensor(a_factors[k].matrix(), b_factors[l].matrix());
  return m;
}

bool verify_cc_decomposition(const DensityMatrix& rho, const CCDecomposition& dec, const BasisList& bases,
                             double tol) {
  if (rho.parties() != 2 || bases.size() != 2) return false;
  const int da = rho.dims()[0], db = rho.dims()[1];
  if (bases[0].dim() != da || bases[1].dim() != db) return false;
  const auto ka = dec.a_factors.size(), kb = dec.b_factors.size();
  if (ka == 0 || kb == 0) return false;
  if (static_cast<std::size_t>(dec.weights.rows()) != ka || static_cast<std::size_t>(dec.weights.cols()) != kb) return false;
  if (dec.a_supports.size() != ka || dec.b_supports.size() != kb) return false;
  if (dec.weights.minCoeff() < -1e-12 || std::abs(dec.weights.sum() - 1.0) > 1e-10) return false;
  for (const auto& f : dec.a_factors)
    if (f.dim() != da) return false;
  for (const auto& f : dec.b_factors)
    if (f.dim() != db) return false;
  if (!pairwise_disjoint(dec.a_supports, da) || !pairwise_disjoint(dec.b_supports, db)) return false;
  for (std::size_t k = 0; k < ka; ++k)
    if (leakage(rotate_in(dec.a_factors[k].matrix(), bases[0]), dec.a_supports[k]) > tol) return false;
  for (std::size_t l = 0; l < kb; ++l)
    if (leakage(rotate_in(dec.b_factors[l].matrix(), bases[1]), dec.b_supports[l]) > tol) return false;
  return max_abs_diff(dec.reconstruct(), rho.matrix()) <= tol;
}

std::optional<CCDecomposition> detect_cc_structure(const DensityMatrix& rho, const BasisList& bases, double tol) {
  if (rho.parties() != 2) throw DimensionError("detect_cc_structure needs a bipartite state");
  const int da = rho.dims()[0], db = rho.dims()[1];
  const Matrix r = to_product_basis(rho.matrix(), rho.dims(), bases);
  auto at = [&](int i, int j, int i2, int j2) { return r(i * db + j, i2 * db + j2); };

  std::vector<bool> active_a(da, false), active_b(db, false);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j) {
      if (r(i * db + j, i * db + j).real() > tol) {
        active_a[i] = true;
        active_b[j] = true;
      }
    }
  std::vector<std::pair<int, int>> ea, eb;
  for (int i = 0; i < da; ++i)
    for (int i2 = i + 1; i2 < da; ++i2) {
      bool linked = false;
      for (int j = 0; j < db && !linked; ++j)
        for (int j2 = 0; j2 < db && !linked; ++j2) linked = std::abs(at(i, j, i2, j2)) > tol;
      if (linked) ea.emplace_back(i, i2);
    }
  for (int j = 0; j < db; ++j)
    for (int j2 = j + 1; j2 < db; ++j2) {
      bool linked = false;
      for (int i = 0; i < da && !linked; ++i)
        for (int i2 = 0; i2 < da && !linked; ++i2) linked = std::abs(at(i, j, i2, j2)) > tol;
      if (linked) eb.emplace_back(j, j2);
    }
  const auto blocks_a = components(da, active_a, ea);
  const auto blocks_b = components(db, active_b, eb);

  const auto ka = blocks_a.size(), kb = blocks_b.size();
  CCDecomposition dec;
  dec.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ka), static_cast<Eigen::Index>(kb));
  std::vector<std::optional<Matrix>> fa(ka), fb(kb);
  for (std::size_t k = 0; k < ka; ++k) {
    for (std::size_t l = 0; l < kb; ++l) {
      const IndexSet& I = blocks_a[k];
      const IndexSet& J = blocks_b[l];
      const int m = static_cast<int>(I.size()), n = static_cast<int>(J.size());
      Matrix block(m * n, m * n);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < n; ++b)
          for (int a2 = 0; a2 < m; ++a2)
            for (int b2 = 0; b2 < n; ++b2) block(a * n + b, a2 * n + b2) = at(I[a], J[b], I[a2], J[b2]);
      const double p = block.trace().real();
      if (p <= tol) {
        if (block.cwiseAbs().maxCoeff() > tol) return std::nullopt;
        continue;
      }
      Matrix realigned(m * m, n * n);
      for (int a = 0; a < m; ++a)
        for (int a2 = 0; a2 < m; ++a2)
          for (int b = 0; b < n; ++b)
            for (int b2 = 0; b2 < n; ++b2) realigned(a * m + a2, b * n + b2) = block(a * n + b, a2 * n + b2);
      Eigen::JacobiSVD<Matrix> svd(realigned);
      const RealVector sv = svd.singularValues();
      if (sv.size() > 1 && sv[1] > kRankOneRatio * sv[0]) return std::nullopt;
      const Matrix a_small = partial_trace(block, {m, n}, {0}) / p;
      const Matrix b_small = partial_trace(block, {m, n}, {1}) / p;
      // One factor per block: every partner must agree.
      if (fa[k] && max_abs_diff(*fa[k], a_small) > tol) return std::nullopt;
      if (fb[l] && max_abs_diff(*fb[l], b_small) > tol) return std::nullopt;
      if (!fa[k]) fa[k] = a_small;
      if (!fb[l]) fb[l] = b_small;
      dec.weights(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = p;
    }
  }
  for (std::size_t k = 0; k < ka; ++k) {
    if (!fa[k]) return std::nullopt;
    const Matrix full = rotate_out(embed_block(*fa[k], blocks_a[k], da), bases[0]);
    dec.a_factors.push_back(DensityMatrix::assume_valid(full, {da}));
    dec.a_supports.push_back(blocks_a[k]);
  }
  for (std::size_t l = 0; l < kb; ++l) {
    if (!fb[l]) return std::nullopt;
    const Matrix full = rotate_out(embed_block(*fb[l], blocks_b[l], db), bases[1]);
    dec.b_factors.push_back(DensityMatrix::assume_valid(full, {db}));
    dec.b_supports.push_back(blocks_b[l]);
  }
  if (dec.weights.size() == 0) return std::nullopt;
  dec.weights /= dec.weights.sum();
  if (!verify_cc_decomposition(rho, dec, bases, std::max(tol, 1e-9))) return std::nullopt;
  return dec;
}

Theorem1Report theorem1_invariance_check(const BipartiteFrame& frame) {
  Theorem1Report rep;
  rep.cc_before = correlated_coherence(frame).value();
  const DensityMatrix measured = measure_local(frame.state(), 1, frame.basis_b());
  rep.cc_after = correlated_coherence(BipartiteFrame(measured, frame.basis_a(), frame.basis_b())).value();
  rep.difference = rep.cc_before - rep.cc_after;
  rep.discord = discord_asym_basis(frame, 1).value();
  rep.invariant = std::abs(rep.difference) <= 1e-8;
  if (std::abs(rep.difference - rep.discord) > 1e-8) {
    std::ostringstream os;
    os << "correlated coherence drop " << rep.difference << " differs from discord " << rep.discord;
    throw InternalError(os.str());
  }
  return rep;
}

Matrix apply_channel(const RecoveryChannel& rc, const Matrix& x) {
  if (rc.measured.empty()) return x;
  return dephase_parties(x, rc.sigma.dims(), rc.bases, rc.measured);
}

Matrix petz_recovery(const RecoveryChannel& rc, const Matrix& x) {
  const int d = rc.sigma.dim();
  if (x.rows() != d || x.cols() != d) throw DimensionError("operator does not match the channel");
  const Matrix es = apply_channel(rc, rc.sigma.matrix());
  const SpectralSupport sup = spectral_support(es, kSupportEigenTol);
  const Matrix proj = sup.vectors * sup.vectors.adjoint();
  const Matrix outside = Matrix::Identity(d, d) - proj;
  const double leak = std::max((outside * x).cwiseAbs().maxCoeff(), (x * outside).cwiseAbs().maxCoeff());
  if (leak > kSupportMassTol) {
    std::ostringstream os;
    os << "operator leaves the support of E(sigma) by " << leak;
    throw ValidationError(Violation::SupportMismatch, os.str());
  }
  RealVector inv = sup.values;
  for (Eigen::Index k = 0; k < inv.size(); ++k) inv[k] = 1.0 / std::sqrt(inv[k]);
  const Matrix es_inv_sqrt = sup.vectors * inv.cast<Complex>().asDiagonal() * sup.vectors.adjoint();
  const Matrix root = psd_sqrt(rc.sigma.matrix());
  return root * apply_channel(rc, es_inv_sqrt * x * es_inv_sqrt) * root;
}

Matrix ClassicalClassicalForm::reconstruct() const {
  const int da = static_cast<int>(psi.rows()), db = static_cast<int>(phi.rows());
  Matrix m = Matrix::Zero(da * db, da * db);
  for (Eigen::Index a = 0; a < lambda.rows(); ++a)
    for (Eigen::Index b = 0; b < lambda.cols(); ++b) {
      if (lambda(a, b) == 0.0) continue;
      const Vector v = tensor(Matrix(psi.col(a)), Matrix(phi.col(b))).col(0);
      m += lambda(a, b) * v * v.adjoint();
    }
  return m;
}

RatioCheckReport appendix_ratio_check(const ClassicalClassicalForm& form, const BasisList& bases) {
  if (bases.size() != 2 || bases[0].dim() != form.psi.rows() || bases[1].dim() != form.phi.rows()) {
    throw DimensionError("bases do not match the classical-classical form");
  }
  const Eigen::Index na = form.lambda.rows(), nb = form.lambda.cols();
  if (form.psi.cols() != na || form.phi.cols() != nb) throw DimensionError("lambda shape does not match the bases");
  const int da = static_cast<int>(form.psi.rows()), db = static_cast<int>(form.phi.rows());
  // Overlaps <i|psi_a> and <j|phi_b> in the fixed bases.
  const Matrix oa = bases[0].columns().adjoint() * form.psi;
  const Matrix ob = bases[1].columns().adjoint() * form.phi;
  const Eigen::MatrixXd wa = oa.cwiseAbs2();
  const Eigen::MatrixXd wb = ob.cwiseAbs2();
  const Eigen::MatrixXd joint = wa * form.lambda * wb.transpose();  // P(i, j)
  const RealVector pa = joint.rowwise().sum();
  const RealVector pb = joint.colwise().sum().transpose();
  const RealVector mu = form.lambda.rowwise().sum();
  const RealVector nu = form.lambda.colwise().sum().transpose();

  RatioCheckReport rep;
  if (mu.minCoeff() <= 1e-12 || nu.minCoeff() <= 1e-12) {
    rep.applicable = false;
    return rep;
  }
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j)
      for (Eigen::Index a = 0; a < na; ++a)
        for (Eigen::Index b = 0; b < nb; ++b) {
          if (std::abs(oa(i, a) * ob(j, b)) <= 1e-10) continue;
          const double lhs = joint(i, j) / (pa[i] * pb[j]);
          const double rhs = form.lambda(a, b) / (mu[a] * nu[b]);
          rep.max_violation = std::max(rep.max_violation, std::abs(lhs - rhs));
          ++rep.terms_checked;
        }
  rep.passed = rep.max_violation <= 1e-8;
  return rep;
}

std::optional<ClassicalClassicalForm> classical_classical_form(const DensityMatrix& rho) {
  if (rho.parties() != 2) throw DimensionError("classical_classical_form needs a bipartite state");
  ClassicalClassicalForm form;
  form.psi = nearest_unitary(eig_hermitian(partial_trace(rho.matrix(), rho.dims(), {0})).eigenvectors);
  form.phi = nearest_unitary(eig_hermitian(partial_trace(rho.matrix(), rho.dims(), {1})).eigenvectors);
  const Matrix rotated = to_product_basis(rho.matrix(), rho.dims(), {LocalBasis(form.psi), LocalBasis(form.phi)});
  const int da = rho.dims()[0], db = rho.dims()[1];
  form.lambda.resize(da, db);
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < db; ++b) form.lambda(a, b) = std::max(0.0, rotated(a * db + b, a * db + b).real());
  if (max_abs_diff(form.reconstruct(), rho.matrix()) > 1e-9) return std::nullopt;
  return form;
}

ClassicalClassicalForm bell_perturbed_form(const ClassicalClassicalForm& form, double eps) {
  const int da = static_cast<int>(form.psi.rows()), db = static_cast<int>(form.phi.rows());
  const int m = std::min(da, db);
  // <psi_a phi_b|Phi+> = (psi^dagger M conj(phi))_ab with M[i][j] = Phi+[i d_B + j]
  Matrix bell = Matrix::Zero(da, db);
  for (int k = 0; k < m; ++k) bell(k, k) = 1.0 / std::sqrt(static_cast<double>(m));
  const Matrix overlap = form.psi.adjoint() * bell * form.phi.conjugate();
  ClassicalClassicalForm out = form;
  out.lambda = (1.0 - eps) * form.lambda + eps * overlap.cwiseAbs2();
  return out;
}

RatioCheckReport appendix_ratio_check(const DensityMatrix& rho, const BasisList& bases) {
  const auto form = classical_classical_form(rho);
  if (!form) {
    RatioCheckReport rep;
    rep.form_matches = false;
    return rep;
  }
  return appendix_ratio_check(*form, bases);
}

namespace {

std::vector<IndexSet> random_partition(int d, Rng& rng) {
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_int_distribution<int> groups_dist(1, d);
  const int groups = groups_dist(rng);
  // groups - 1 distinct cut points in 1..d-1.
  std::vector<int> cuts(d - 1);
  std::iota(cuts.begin(), cuts.end(), 1);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(static_cast<std::size_t>(groups - 1));
  cuts.push_back(0);
  cuts.push_back(d);
  std::sort(cuts.begin(), cuts.end());
  std::vector<IndexSet> out;
  for (std::size_t g = 0; g + 1 < cuts.size(); ++g) {
    IndexSet s(idx.begin() + cuts[g], idx.begin() + cuts[g + 1]);
    std::sort(s.begin(), s.end());
    out.push_back(std::move(s));
  }
  return out;
}

Matrix random_factor(const IndexSet& support, int d, Rng& rng) {
  const int m = static_cast<int>(support.size());
  const DensityMatrix small = random_mixed_state({m}, rng);
  return embed_block(small.matrix(), support, d);
}

}  // namespace

ConstructedCC random_cc_state(int da, int db, Rng& rng, bool full_rank_marginals) {
  if (da < 1 || db < 1) throw DimensionError("dimensions must be positive");
  const auto sa = random_partition(da, rng);
  const auto sb = random_partition(db, rng);
  BasisList bases{random_basis(da, rng), random_basis(db, rng)};
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution drop(0.3);
  Eigen::MatrixXd w(static_cast<Eigen::Index>(sa.size()), static_cast<Eigen::Index>(sb.size()));
  for (Eigen::Index k = 0; k < w.rows(); ++k)
    for (Eigen::Index l = 0; l < w.cols(); ++l) w(k, l) = drop(rng) ? 0.0 : expo(rng);
  if (w.sum() <= 0.0) w(0, 0) = 1.0;
  if (full_rank_marginals) {
    for (Eigen::Index k = 0; k < w.rows(); ++k)
      if (w.row(k).sum() <= 0.0) w(k, k % w.cols()) = expo(rng) + 0.1;
    for (Eigen::Index l = 0; l < w.cols(); ++l)
      if (w.col(l).sum() <= 0.0) w(l % w.rows(), l) = expo(rng) + 0.1;
  }
  w /= w.sum();

  CCDecomposition dec;
  dec.weights = w;
  for (const auto& s : sa) {
    dec.a_factors.push_back(DensityMatrix::assume_valid(rotate_out(random_factor(s, da, rng), bases[0]), {da}));
    dec.a_supports.push_back(s);
  }
  for (const auto& s : sb) {
    dec.b_factors.push_back(DensityMatrix::assume_valid(rotate_out(random_factor(s, db, rng), bases[1]), {db}));
    dec.b_supports.push_back(s);
  }
  DensityMatrix state = validate_density(dec.reconstruct(), {da, db});
  return ConstructedCC{std::move(state), std::move(dec), std::move(bases)};
}

CCDecomposition paper_qutrit_decomposition() {
  auto proj = [](const Vector& v) { return Matrix(v * v.adjoint()); };
  CCDecomposition dec;
  dec.weights = Eigen::MatrixXd::Zero(2, 2);
  dec.weights(0, 0) = 0.5;
  dec.weights(1, 1) = 0.5;
  dec.a_factors.push_back(validate_density(0.5 * proj(ket(3, 0)) + 0.5 * proj(plus_ket(3, 0, 1)), {3}));
  dec.a_factors.push_back(validate_density(proj(ket(3, 2)), {3}));
  dec.b_factors.push_back(validate_density((2.0 / 3.0) * proj(ket(3, 0)) + (1.0 / 3.0) * proj(plus_ket(3, 0, 2)), {3}));
  dec.b_factors.push_back(validate_density(proj(ket(3, 1)), {3}));
  dec.a_supports = {{0, 1}, {2}};
  dec.b_supports = {{0, 2}, {1}};
  return dec;
}

}  // namespace coherekit
