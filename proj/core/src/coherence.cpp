#include "coherekit/coherence.hpp"

#include "coherekit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace coherekit {

namespace {

void check_frame(const Dims& dims, const BasisList& bases) {
  if (dims.size() != bases.size()) throw DimensionError("one basis per subsystem is required");
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (dims[k] != bases[k].dim()) throw DimensionError("basis dimension does not match subsystem");
  }
}

// Composite index -> key built from the digits of `parties` only.
std::vector<int> party_keys(const Dims& dims, const std::vector<int>& parties) {
  const int n = total_dim(dims);
  const int np = static_cast<int>(dims.size());
  std::vector<bool> sel(np, false);
  for (int p : parties) {
    if (p < 0 || p >= np) throw DimensionError("subsystem index out of range");
    sel[p] = true;
  }
  std::vector<int> key(n);
  std::vector<int> digits(np);
  for (int idx = 0; idx < n; ++idx) {
    int rem = idx;
    for (int p = np - 1; p >= 0; --p) {
      digits[p] = rem % dims[p];
      rem /= dims[p];
    }
    int kv = 0;
    for (int p = 0; p < np; ++p)
      if (sel[p]) kv = kv * dims[p] + digits[p];
    key[idx] = kv;
  }
  return key;
}

}  // namespace

BipartiteFrame::BipartiteFrame(DensityMatrix state, LocalBasis basis_a, LocalBasis basis_b)
    : state_(std::move(state)) {
  if (state_.parties() != 2) throw DimensionError("frame state must be bipartite");
  bases_.push_back(std::move(basis_a));
  bases_.push_back(std::move(basis_b));
  check_frame(state_.dims(), bases_);
}

BipartiteFrame::BipartiteFrame(DensityMatrix state) : state_(std::move(state)) {
  if (state_.parties() != 2) throw DimensionError("frame state must be bipartite");
  bases_ = computational_bases(state_.dims());
}

CoherenceEvaluator::CoherenceEvaluator(const Matrix& rho, Dims dims) : dims_(std::move(dims)) {
  if (total_dim(dims_) != rho.rows()) throw DimensionError("dims do not match operator size");
  const SpectralSupport sup = spectral_support(rho, kSupportEigenTol);
  scaled_support_ = sup.vectors;
  for (Eigen::Index k = 0; k < sup.values.size(); ++k) scaled_support_.col(k) *= std::sqrt(sup.values[k]);
  entropy_ = von_neumann_bits(rho);
}

RealVector CoherenceEvaluator::diagonal(const BasisList& bases) const {
  check_frame(dims_, bases);
  Matrix w = scaled_support_;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (bases[k].is_computational()) continue;
    apply_local_left(w, dims_, static_cast<int>(k), bases[k].columns().adjoint());
  }
  return w.cwiseAbs2().rowwise().sum();
}

double CoherenceEvaluator::operator()(const BasisList& bases) const {
  return shannon_bits(diagonal(bases)) - entropy_;
}

double CoherenceEvaluator::partial(const BasisList& bases, const std::vector<int>& parties) const {
  check_frame(dims_, bases);
  if (parties.size() == dims_.size()) return (*this)(bases);
  Matrix w = scaled_support_;
  for (int p : parties) {
    if (bases[p].is_computational()) continue;
    apply_local_left(w, dims_, p, bases[p].columns().adjoint());
  }
  // Pi(rho) is block diagonal over the measured digits; its spectrum is the
  // union of the block spectra, each computed from the rows of w in the block.
  const std::vector<int> key = party_keys(dims_, parties);
  const int n = static_cast<int>(key.size());
  int blocks = 0;
  for (int k : key) blocks = std::max(blocks, k + 1);
  std::vector<std::vector<int>> rows(blocks);
  for (int i = 0; i < n; ++i) rows[key[i]].push_back(i);
  double h = 0.0;
  for (const auto& r : rows) {
    Matrix wb(static_cast<Eigen::Index>(r.size()), w.cols());
    for (std::size_t a = 0; a < r.size(); ++a) wb.row(static_cast<Eigen::Index>(a)) = w.row(r[a]);
    // Nonzero spectrum of wb wb^dagger equals that of wb^dagger wb; use the smaller.
    const Matrix g = wb.rows() <= wb.cols() ? Matrix(wb * wb.adjoint()) : Matrix(wb.adjoint() * wb);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    h += shannon_bits(es.eigenvalues());
  }
  return h - entropy_;
}

EntropyValue coherence_re(const DensityMatrix& rho, const BasisList& bases) {
  check_frame(rho.dims(), bases);
  const CoherenceEvaluator ev(rho.matrix(), rho.dims());
  const double c = ev(bases);
  // C_re is a relative entropy; tiny negatives are round-off.
  return EntropyValue::finite(c < 0.0 && c > -1e-10 ? 0.0 : c);
}

namespace {

std::vector<CoherenceEvaluator> local_evaluators(const DensityMatrix& rho) {
  std::vector<CoherenceEvaluator> out;
  for (int k = 0; k < rho.parties(); ++k) {
    const Matrix m = partial_trace(rho.matrix(), rho.dims(), {k});
    out.emplace_back(m, Dims{rho.dims()[k]});
  }
  return out;
}

}  // namespace

CorrelatedCoherenceEvaluator::CorrelatedCoherenceEvaluator(const DensityMatrix& rho)
    : global_(rho.matrix(), rho.dims()), locals_(local_evaluators(rho)) {
  if (rho.parties() < 2) throw DimensionError("correlated coherence needs at least two parties");
}

double CorrelatedCoherenceEvaluator::operator()(const BasisList& bases) const {
  double c = global_(bases);
  BasisList one(1, bases[0]);
  for (std::size_t k = 0; k < locals_.size(); ++k) {
    one[0] = bases[k];
    c -= locals_[k](one);
  }
  return c;
}

EntropyValue clamp_correlated(double bits) {
  if (bits < 0.0) {
    if (bits < -1e-9) {
      std::ostringstream os;
      os << "correlated coherence " << bits << " is negative beyond round-off";
      throw InternalError(os.str());
    }
    bits = 0.0;
  }
  return EntropyValue::finite(bits);
}

EntropyValue correlated_coherence(const BipartiteFrame& frame) {
  const CorrelatedCoherenceEvaluator ev(frame.state());
  return clamp_correlated(ev(frame.bases()));
}

OracleResult coherence_re_min_oracle(const DensityMatrix& rho, const BasisList& bases,
                                     const OptimizerConfig& cfg) {
  cfg.validate();
  check_frame(rho.dims(), bases);
  if (rho.dim() > 16) throw DimensionError("coherence_re_min_oracle is limited to total dimension 16");
  const int n = rho.dim();
  const RealVector p = to_product_basis(rho.matrix(), rho.dims(), bases).diagonal().real();
  const double s = von_neumann_bits(rho.matrix());

  // S(rho || diag(q)) = -S(rho) - sum_i p_i log2 q_i.
  const Objective f = [&](const RealVector& x) {
    const double m = x.maxCoeff();
    double z = 0.0;
    for (int i = 0; i < n; ++i) z += std::exp(x[i] - m);
    const double logz = m + std::log(z);
    double cross = 0.0;
    for (int i = 0; i < n; ++i)
      if (p[i] > 0.0) cross += p[i] * (x[i] - logz);
    return -s - cross / std::log(2.0);
  };

  std::vector<double> best(static_cast<std::size_t>(cfg.restarts));
  std::vector<char> conv(static_cast<std::size_t>(cfg.restarts));
  parallel_for(best.size(), [&](std::size_t r) {
    Rng rng(derive_seed(cfg.seed, r));
    std::normal_distribution<double> g(0.0, 1.0);
    RealVector x0(n);
    for (int i = 0; i < n; ++i) x0[i] = g(rng);
    NelderMeadOptions opt;
    opt.max_iters = cfg.max_iters;
    opt.tol = cfg.tol;
    opt.initial_step = 1.0;
    const NelderMeadResult res = nelder_mead(f, x0, opt);
    best[r] = res.fx;
    conv[r] = res.converged;
  });
  std::vector<double> sorted = best;
  std::sort(sorted.begin(), sorted.end());
  OracleResult out;
  const double v = sorted.front();
  out.value = EntropyValue::finite(v < 0.0 && v > -1e-10 ? 0.0 : v);
  out.spread = sorted.size() > 1 ? sorted[1] - sorted[0] : 0.0;
  out.converged = out.spread <= 1e-6;
  return out;
}

}  // namespace coherekit
