#pragma once

// Structure of states with vanishing correlated coherence: coherence
// supports, CC decompositions (verification and detection), measurement
// invariance of correlated coherence and the Petz recovery map.

#include "coherekit/coherence.hpp"

#include <optional>

namespace coherekit {

using IndexSet = std::vector<int>;

/// { i : <i|rho|i> > tol } in the fixed basis of a single-system state.
IndexSet coherence_support(const DensityMatrix& rho, const LocalBasis& basis, double tol = 1e-9);

/// rho = sum_kl p_kl rho_A^k (x) rho_B^l, where the factors of each side have
/// pairwise disjoint coherence supports. Factors are given in the original
/// (unrotated) coordinates; supports index the fixed basis.
struct CCDecomposition {
  Eigen::MatrixXd weights;  // p_kl, rows k (A factors), cols l (B factors)
  std::vector<DensityMatrix> a_factors;
  std::vector<DensityMatrix> b_factors;
  std::vector<IndexSet> a_supports;
  std::vector<IndexSet> b_supports;

  Matrix reconstruct() const;
};

/// True iff weights form a distribution, the reconstruction matches rho, every
/// factor lives on its support and supports on each side are disjoint, all
/// at tol.
bool verify_cc_decomposition(const DensityMatrix& rho, const CCDecomposition& dec, const BasisList& bases,
                             double tol = 1e-9);

/// Support-graph heuristic: connected components of the index adjacency on
/// each side give candidate blocks; every block pair must have operator
/// Schmidt rank 1 (sigma_2 <= 1e-8 sigma_1). The result is re-verified before
/// it is returned; nullopt means "not found".
std::optional<CCDecomposition> detect_cc_structure(const DensityMatrix& rho, const BasisList& bases,
                                                   double tol = 1e-9);

struct Theorem1Report {
  double cc_before = 0.0;  // C^cc(rho)
  double cc_after = 0.0;   // C^cc(Pi_B(rho))
  double difference = 0.0;
  double discord = 0.0;    // D^{A|B} in the frame's B basis
  bool invariant = false;  // |difference| <= 1e-8
};

/// Throws InternalError if difference and discord disagree beyond 1e-8.
Theorem1Report theorem1_invariance_check(const BipartiteFrame& frame);

/// Local von Neumann measurement on `measured` subsystems in `bases`
/// together with the reference state sigma. No measured subsystems means
/// the identity channel.
struct RecoveryChannel {
  DensityMatrix sigma;
  BasisList bases;
  std::vector<int> measured;
};

Matrix apply_channel(const RecoveryChannel& rc, const Matrix& x);

/// R(X) = sigma^1/2 E(E(sigma)^-1/2 X E(sigma)^-1/2) sigma^1/2 with inverse
/// square roots restricted to the support of E(sigma). Throws
/// ValidationError(SupportMismatch) when X reaches outside that support by
/// more than 1e-10.
Matrix petz_recovery(const RecoveryChannel& rc, const Matrix& x);

/// rho = sum_ab lambda_ab |psi_a><psi_a| (x) |phi_b><phi_b| with orthonormal
/// columns psi (A) and phi (B).
struct ClassicalClassicalForm {
  Eigen::MatrixXd lambda;
  Matrix psi;
  Matrix phi;

  Matrix reconstruct() const;
};

struct RatioCheckReport {
  bool passed = false;
  double max_violation = 0.0;
  int terms_checked = 0;
  bool form_matches = true;  // false when the state is not of the given form
  bool applicable = true;    // false when a marginal of the form is rank deficient
};

/// For every (i, j, a, b) with |<i|psi_a><j|phi_b>| > 1e-10 and nonzero
/// marginals, compares
///   P(i,j) / (P_A(i) P_B(j))  with  lambda_ab / (mu_a nu_b)
/// where P is the measured distribution; passes at 1e-8. The identity relies
/// on rho_A^-1/2 rho_A^1/2 = 1, so it is only checked when every mu_a and nu_b
/// exceeds 1e-12; otherwise the report is marked not applicable and fails.
RatioCheckReport appendix_ratio_check(const ClassicalClassicalForm& form, const BasisList& bases);

/// lambda in the canonical marginal eigenbases, or nullopt unless that form
/// reconstructs rho within 1e-9.
std::optional<ClassicalClassicalForm> classical_classical_form(const DensityMatrix& rho);

/// (1 - eps) lambda + eps |<psi_a phi_b|Phi+>|^2 in the same bases, with
/// Phi+ the maximally entangled vector on min(d_A, d_B) levels of the
/// computational product basis. The result keeps the classical-classical
/// form but generally carries correlated coherence.
ClassicalClassicalForm bell_perturbed_form(const ClassicalClassicalForm& form, double eps);

/// Uses classical_classical_form; fails with form_matches = false when rho has
/// no such form.
RatioCheckReport appendix_ratio_check(const DensityMatrix& rho, const BasisList& bases);

struct ConstructedCC {
  DensityMatrix state;
  CCDecomposition decomposition;
  BasisList bases;
};

/// Random CC state: random partitions of each side's index set into
/// supports, Hilbert-Schmidt factors on each support, random weights (some
/// zero), all rotated by Haar-random local bases. With full_rank_marginals
/// every support block keeps positive total weight.
ConstructedCC random_cc_state(int da, int db, Rng& rng, bool full_rank_marginals = false);

/// The stated two-term decomposition of paper_qutrit_example().
CCDecomposition paper_qutrit_decomposition();

}  // namespace coherekit
