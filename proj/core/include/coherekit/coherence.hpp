#pragma once

// Relative entropy of coherence, correlated coherence and a brute-force
// minimization oracle over incoherent states.

#include "coherekit/entropy.hpp"
#include "coherekit/optimize.hpp"

namespace coherekit {

/// Bipartite state together with the fixed bases of both subsystems.
class BipartiteFrame {
 public:
  BipartiteFrame(DensityMatrix state, LocalBasis basis_a, LocalBasis basis_b);
  /// Computational bases on both sides.
  explicit BipartiteFrame(DensityMatrix state);

  const DensityMatrix& state() const noexcept { return state_; }
  const LocalBasis& basis_a() const noexcept { return bases_[0]; }
  const LocalBasis& basis_b() const noexcept { return bases_[1]; }
  const BasisList& bases() const noexcept { return bases_; }

 private:
  DensityMatrix state_;
  BasisList bases_;
};

/// C_re(rho) = S(Pi(rho)) - S(rho) in the product of the given bases.
EntropyValue coherence_re(const DensityMatrix& rho, const BasisList& bases);

/// Fast repeated evaluation of C_re for one state under many bases. The
/// spectral support of rho is computed once; each call costs
/// O(d * rank * sum d_k).
class CoherenceEvaluator {
 public:
  CoherenceEvaluator(const Matrix& rho, Dims dims);
  /// Unclamped C_re in bits.
  double operator()(const BasisList& bases) const;
  /// Unclamped C_re with the dephasing performed only on `parties`;
  /// returns S(Pi_parties(rho)) - S(rho).
  double partial(const BasisList& bases, const std::vector<int>& parties) const;
  /// Diagonal of rho in the rotated product basis.
  RealVector diagonal(const BasisList& bases) const;
  double entropy() const noexcept { return entropy_; }
  const Dims& dims() const noexcept { return dims_; }

 private:
  Dims dims_;
  Matrix scaled_support_;  // columns sqrt(s_m) w_m
  double entropy_ = 0.0;
};

/// Correlated coherence for N >= 2 parties: C_re(rho) - sum_k C_re(rho_k).
/// For N = 2 this is the quantum correlated coherence; for larger N it is
/// the basis-dependent global discord.
class CorrelatedCoherenceEvaluator {
 public:
  explicit CorrelatedCoherenceEvaluator(const DensityMatrix& rho);
  double operator()(const BasisList& bases) const;
  int parties() const noexcept { return static_cast<int>(locals_.size()); }

 private:
  CoherenceEvaluator global_;
  std::vector<CoherenceEvaluator> locals_;
};

/// Round-off below zero down to -1e-9 is clamped to 0; anything lower throws
/// InternalError (super-additivity would be violated).
EntropyValue clamp_correlated(double bits);

EntropyValue correlated_coherence(const BipartiteFrame& frame);

struct OracleResult {
  EntropyValue value;
  bool converged = false;
  double spread = 0.0;  // gap between the two best restarts
};

/// min over diagonal sigma of S(rho || sigma), sigma = diag(softmax(x)) in the
/// rotated basis, by Nelder-Mead with cfg.restarts random starts. Only used
/// to validate coherence_re. Total dimension <= 16.
OracleResult coherence_re_min_oracle(const DensityMatrix& rho, const BasisList& bases,
                                     const OptimizerConfig& cfg);

}  // namespace coherekit
