#pragma once

// Named state families and seeded random generators.

#include "coherekit/opcore.hpp"

namespace coherekit {

/// Haar-random unitary (QR of a complex Ginibre matrix with the phase fix).
Matrix haar_unitary(int d, Rng& rng);
LocalBasis random_basis(int d, Rng& rng);
BasisList random_bases(const Dims& dims, Rng& rng);

/// Haar-random unit vector on the composite space.
Vector random_pure_vector(const Dims& dims, Rng& rng);

/// |psi><psi|; throws ValidationError(NotUnitNorm) unless ||psi|| = 1 +- 1e-10.
DensityMatrix pure_state(const Vector& psi, const Dims& dims);

DensityMatrix random_pure_state(const Dims& dims, Rng& rng);

/// Hilbert-Schmidt random mixed state G G^dagger / Tr, G of size d x rank.
/// rank <= 0 means full rank.
DensityMatrix random_mixed_state(const Dims& dims, Rng& rng, int rank = 0);

DensityMatrix maximally_mixed(const Dims& dims);

/// Computational basis ket |i> in dimension d.
Vector ket(int d, int i);
/// (|i> + |j>) / sqrt(2) in dimension d.
Vector plus_ket(int d, int i, int j);

/// (|00> + |11>) / sqrt(2).
DensityMatrix bell_state();
/// (|0...0> + |1...1>) / sqrt(2) on n qubits.
DensityMatrix ghz_state(int n = 3);

/// Qutrit-qutrit state with vanishing correlated coherence but coherent
/// marginals:
/// 1/2 (1/2|0><0| + 1/2|+01><+01|) (x) (2/3|0><0| + 1/3|+02><+02|)
///   + 1/2 |2><2| (x) |1><1|.
DensityMatrix paper_qutrit_example();

}  // namespace coherekit
