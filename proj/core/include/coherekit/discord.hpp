#pragma once

// Local von Neumann measurements, basis-dependent discords, basis-minimized
// discords and global quantum discord.

#include "coherekit/coherence.hpp"

namespace coherekit {

struct BasisSearchResult {
  EntropyValue value;      // measure re-evaluated at argmin_bases
  BasisList argmin_bases;  // one per subsystem; unmeasured sides stay computational
  bool converged = false;  // spread <= 1e-5
  double spread = 0.0;     // gap between the two best restarts
};

/// sum_j (|j><j| on `target`) rho (|j><j| on `target`).
DensityMatrix measure_local(const DensityMatrix& rho, int target, const LocalBasis& basis);

/// S(rho || rho_A (x) rho_B) - S(Pi_M(rho) || Pi_M(rho_A (x) rho_B)) where M
/// is the measured side (0 = A, 1 = B; default B).
EntropyValue discord_asym_basis(const BipartiteFrame& frame, int measured = 1);

/// S(rho || rho_A (x) rho_B) - S(Pi_A (x) Pi_B(rho) || Pi_A(rho_A) (x) Pi_B(rho_B)).
EntropyValue discord_sym_basis(const BipartiteFrame& frame);

/// Minimum of the correlated coherence over local bases. Total dim <= 36.
BasisSearchResult discord_sym_min(const DensityMatrix& rho, const OptimizerConfig& cfg);

/// Minimum of discord_asym_basis over the measured side's basis. Total dim <= 36.
BasisSearchResult discord_asym_min(const DensityMatrix& rho, const OptimizerConfig& cfg, int measured = 1);

/// C_re(rho) - sum_k C_re(rho_k) in the product of the given bases. N >= 2.
EntropyValue gqd_basis(const DensityMatrix& rho, const BasisList& bases);

/// Minimum of gqd_basis over all local bases. Total dim <= 27.
BasisSearchResult gqd_min(const DensityMatrix& rho, const OptimizerConfig& cfg);

/// Evaluates D^{A|B}-type discord for many measurement bases on one side
/// as S(Pi_M(rho)) - S(rho) - [S(Pi_M(rho_M)) - S(rho_M)].
class AsymmetricDiscordEvaluator {
 public:
  AsymmetricDiscordEvaluator(const DensityMatrix& rho, int measured);
  double operator()(const LocalBasis& basis) const;

 private:
  Dims dims_;
  int measured_;
  CoherenceEvaluator global_;
  CoherenceEvaluator local_;
};

}  // namespace coherekit
