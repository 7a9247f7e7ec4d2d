#pragma once

// Unitarily symmetric extensions and entanglement-of-coherence bounds.
//
// An extension lives on X (x) Y with X = A A' and Y = B B'; composite index
// of (a, a') in X is a * d_A' + a'. Both constructions here choose
// d_A d_A' = d_B d_B' so that the X <-> Y swap is defined.

#include "coherekit/coherence.hpp"
#include "coherekit/entanglement.hpp"

#include <optional>
#include <string>

namespace coherekit {

struct ExtensionPartition {
  int da = 1;
  int da_ext = 1;
  int db = 1;
  int db_ext = 1;
};

struct ExtensionWitness {
  DensityMatrix state;  // dims [da * da_ext, db * db_ext]
  ExtensionPartition partition;
  LocalBasis eigenbasis_aa;  // diagonalizes rho_X
  LocalBasis eigenbasis_bb;  // diagonalizes rho_Y
  Matrix swap_u_aa;          // applied to X after the swap
  Matrix swap_u_bb;          // applied to Y after the swap
  Matrix original;           // the extended rho_AB
};

/// Builds sum_i p_i |Psi_i><Psi_i| with Psi_i = sum_j c_ij |e_ij, i>_X |f_ij, i>_Y
/// from per-member Schmidt decompositions, using the Schmidt-product bases as
/// eigenbases and U_X = E F^dagger, U_Y = F E^dagger. With n members and
/// L = lcm(d_A, d_B) the local extension dimension is n L.
ExtensionWitness delta_extension(const PureEnsemble& ensemble);

/// rho (x) |0 0><0 0| with the canonical marginal eigenbases paired in
/// descending eigenvalue order. Not symmetric for every rho; check with
/// verify_unitary_symmetry.
ExtensionWitness trivial_extension(const DensityMatrix& rho);

/// Re-checks reconstruction of the original state, that the eigenbases
/// diagonalize rho_X and rho_Y, and
/// (U_X (x) U_Y) T (state) T^dagger (U_X (x) U_Y)^dagger = state, all at tol.
bool verify_unitary_symmetry(const ExtensionWitness& ext, double tol = 1e-9);

/// Correlated coherence of the extension in its stored eigenbases. Throws
/// ValidationError(SymmetryBroken) if the witness fails verification.
EntropyValue cc_of_extension(const ExtensionWitness& ext);

/// Same eigenbases rotated inside degenerate eigenvalue clusters
/// (gap < 1e-8) of rho_X; E and F clusters get the same rotation, so the
/// swap unitaries are unchanged. Empty if the spectrum has no degeneracy.
std::vector<ExtensionWitness> degenerate_rotations(const ExtensionWitness& ext, int count, Rng& rng);

/// Witness for ext1 (x) ext2 with subsystems ordered A1 A2 A1' A2' | B1 B2 B1' B2'.
ExtensionWitness tensor_extension(const ExtensionWitness& ext1, const ExtensionWitness& ext2);

struct EocOptions {
  int eof_ensemble_size = 0;     // 0: (d_A d_B)^2
  int ere_ensemble_size = 0;     // 0: (d_A d_B)^2
  int random_candidates = 16;    // random feasible ensembles with K = rank
  int degenerate_rotations = 8;
  int max_extension_dim = 2048;  // candidates with a larger total dimension are skipped
  double ordering_tol = 2e-3;
};

struct BoundsReport {
  EntropyValue e_re_lower;
  EntropyValue eoc_upper;
  EntropyValue e_f;
  bool ordering_ok = false;

  std::string best_candidate;  // "trivial", "delta-eof", "delta-eigen", "delta-random" or "none"
  int candidates_evaluated = 0;
  int candidates_skipped = 0;
  bool trivial_symmetric = false;
  bool degenerate = false;
  double degenerate_spread = 0.0;
  bool eof_converged = false;
  double eof_spread = 0.0;
  bool ere_converged = false;
  double ere_spread = 0.0;
};

/// e_re_lower from ere_numeric (warm-started from the E_f argmin), e_f from
/// the two-qubit closed form or eof_numeric, eoc_upper as the minimum of
/// cc_of_extension over the candidate family. When the E_f argmin is too
/// large for a Delta-extension under max_extension_dim, E_f is re-minimized
/// with the largest ensemble that fits. eoc_upper is +inf ("none") if no
/// candidate fits. Total dimension <= 16.
BoundsReport eoc_upper_bound(const DensityMatrix& rho, const OptimizerConfig& cfg, const EocOptions& opts = {});

struct SubadditivityReport {
  bool passed = false;
  bool symmetric = false;
  double first = 0.0;     // cc_of_extension of the chosen rho candidate
  double second = 0.0;    // same for tau
  double combined = 0.0;  // cc_of_extension of the tensor witness
  std::string first_candidate;
  std::string second_candidate;
};

/// Builds candidate extensions for rho and tau, picks the lowest pair whose
/// tensor witness has total dimension <= 1024 (DimensionError otherwise) and
/// checks symmetry plus cc(ext1 (x) ext2) = cc(ext1) + cc(ext2) within 1e-8.
/// Combined dimension of rho (x) tau <= 36.
SubadditivityReport eoc_subadditivity_report(const DensityMatrix& rho, const DensityMatrix& tau,
                                             const OptimizerConfig& cfg);
bool eoc_subadditivity_check(const DensityMatrix& rho, const DensityMatrix& tau, const OptimizerConfig& cfg);

}  // namespace coherekit
