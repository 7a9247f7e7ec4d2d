#pragma once

// Entanglement of formation, relative entropy of entanglement and maximally
// correlated states.

#include "coherekit/entropy.hpp"
#include "coherekit/optimize.hpp"

#include <vector>

namespace coherekit {

/// Weights p_k with unit vectors |psi_k> on a bipartite space.
struct PureEnsemble {
  Dims dims;
  RealVector weights;
  std::vector<Vector> states;

  /// Validates weights (sum 1 +- 1e-10, non-negative) and unit norms.
  static PureEnsemble make(Dims dims, RealVector weights, std::vector<Vector> states);
  std::size_t size() const noexcept { return states.size(); }
  Matrix reconstruct() const;
  /// sum_k p_k E(psi_k).
  double average_entanglement() const;
};

/// sum_m q_m |a_m><a_m| (x) |b_m><b_m| with unit local vectors.
struct SeparableEnsemble {
  Dims dims;
  RealVector weights;
  std::vector<Vector> a_states;
  std::vector<Vector> b_states;

  std::size_t size() const noexcept { return a_states.size(); }
  Matrix assemble() const;
};

/// Entropy of Tr_B |psi><psi|. Throws ValidationError(NotUnitNorm) unless
/// ||psi|| = 1 +- 1e-10.
EntropyValue entanglement_pure(const Vector& psi, const Dims& dims);

/// ||v||^2 * E(v / ||v||) for an unnormalized vector; 0 for v = 0.
double weighted_entanglement(const Vector& v, int da, int db);

/// Wootters concurrence of a two-qubit state.
double concurrence(const DensityMatrix& rho);
EntropyValue eof_two_qubit(const DensityMatrix& rho);

struct EofResult {
  EntropyValue value;
  PureEnsemble argmin;
  bool converged = false;
  double spread = 0.0;
};

/// Upper bound on E_f by descent over decompositions rho = sum psi~_k psi~_k^dagger,
/// psi~_k = sum_j U_kj sqrt(lambda_j) v_j with U a K x rank isometry. The search
/// applies Givens rotations to pairs of members, so every iterate is feasible.
/// K <= 0 means (d_A d_B)^2. Total dimension <= 16.
EofResult eof_numeric(const DensityMatrix& rho, const OptimizerConfig& cfg, int ensemble_size = 0);

struct EreResult {
  EntropyValue value;  // S(rho || sigma*) against the unregularized sigma*
  SeparableEnsemble argmin;
  bool converged = false;
  double spread = 0.0;
  double regularization_gap = 0.0;  // |regularized - unregularized| at sigma*
};

/// Upper bound on E_re by descent over K-term separable states. Restart 0
/// starts from rho dephased in the product of its marginal eigenbases,
/// restart 1 from the Schmidt-dephased eigen-ensemble, then any caller warm
/// starts, then random ensembles. K <= 0 means (d_A d_B)^2; K grows if a
/// warm start needs more terms. Total dimension <= 16.
EreResult ere_numeric(const DensityMatrix& rho, const OptimizerConfig& cfg, int ensemble_size = 0,
                      const std::vector<SeparableEnsemble>& warm_starts = {});

/// sum_ij rho*_ij |ii><jj|.
DensityMatrix max_corr_state(const DensityMatrix& rho_star);

/// C_re(rho*) for a maximally correlated rho; entries off the |ii><jj|
/// pattern must be below 1e-10, otherwise ValidationError(NotMaximallyCorrelated).
EntropyValue ere_max_corr(const DensityMatrix& rho);

/// Spectral decomposition as an ensemble (support eigenvectors).
PureEnsemble eigen_ensemble(const DensityMatrix& rho);

/// K members from a Haar-random K x rank isometry applied to the spectral
/// square root. Members with zero weight are dropped.
PureEnsemble random_feasible_ensemble(const DensityMatrix& rho, int ensemble_size, Rng& rng);

/// Drops zero weights, merges parallel members and removes members by
/// linear dependence of their projectors until at most rank^2 remain. The
/// reconstructed state is unchanged and the average entanglement does not
/// increase.
PureEnsemble compress_ensemble(const PureEnsemble& ensemble);

/// Replaces each member by its Schmidt-dephased mixture sum_j lambda_j^2 |e_j f_j><e_j f_j|.
SeparableEnsemble schmidt_dephased(const PureEnsemble& ensemble);

struct SchmidtDecomposition {
  RealVector coefficients;  // descending, length min(d_A, d_B)
  Matrix a_vectors;         // d_A x d_A, column j pairs with coefficient j
  Matrix b_vectors;         // d_B x d_B
};

/// psi = sum_j c_j a_j (x) b_j from a full SVD of the coefficient matrix.
SchmidtDecomposition schmidt(const Vector& psi, int da, int db);

}  // namespace coherekit
