#include <coherekit/entanglement.hpp>
#include <coherekit/states.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace coherekit;

namespace {

DensityMatrix rho_mc() { return validate_density(oracle::rho_mc(), {2, 2}); }

OptimizerConfig small_cfg(std::uint64_t seed, int restarts = 4) {
  OptimizerConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(Pure, KnownValues) {
  Vector psi = Vector::Zero(4);
  psi[0] = std::sqrt(0.9);
  psi[3] = std::sqrt(0.1);
  EXPECT_NEAR(entanglement_pure(psi, {2, 2}).value(), 0.468996, 1e-6);
  EXPECT_NEAR(entanglement_pure(psi, {2, 2}).value(), oracle::h2(0.9), 1e-13);
  Vector phi = Vector::Zero(4);
  phi[0] = phi[3] = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(entanglement_pure(phi, {2, 2}).value(), 1.0, 1e-14);
  EXPECT_EQ(entanglement_pure(ket(4, 2), {2, 2}).value(), 0.0);
  EXPECT_THROW(entanglement_pure(2.0 * phi, {2, 2}), ValidationError);
}

TEST(Pure, MatchesReducedStateOracle) {
  Rng rng(61);
  for (int t = 0; t < 20; ++t) {
    const Dims dims = t % 2 ? Dims{2, 3} : Dims{3, 3};
    const Vector psi = random_pure_vector(dims, rng);
    EXPECT_NEAR(entanglement_pure(psi, dims).value(), oracle::pure_entanglement(psi, dims[0], dims[1]), 1e-11);
    EXPECT_NEAR(weighted_entanglement(0.5 * psi, dims[0], dims[1]),
                0.25 * oracle::pure_entanglement(psi, dims[0], dims[1]), 1e-11);
  }
  EXPECT_EQ(weighted_entanglement(Vector::Zero(6), 2, 3), 0.0);
}

TEST(SchmidtTest, Reconstructs) {
  Rng rng(62);
  const Vector psi = random_pure_vector({2, 3}, rng);
  const SchmidtDecomposition s = schmidt(psi, 2, 3);
  ASSERT_EQ(s.coefficients.size(), 2);
  EXPECT_GE(s.coefficients[0], s.coefficients[1]);
  Vector rec = Vector::Zero(6);
  for (int j = 0; j < 2; ++j)
    rec += s.coefficients[j] * oracle::kron(s.a_vectors.col(j), s.b_vectors.col(j));
  EXPECT_LT((rec - psi).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Concurrence, MatchesOracle) {
  Rng rng(63);
  for (int t = 0; t < 30; ++t) {
    const DensityMatrix rho = random_mixed_state({2, 2}, rng, 1 + t % 4);
    EXPECT_NEAR(concurrence(rho), oracle::concurrence(rho.matrix()), 1e-8);
    EXPECT_NEAR(eof_two_qubit(rho).value(), oracle::eof_from_concurrence(oracle::concurrence(rho.matrix())), 1e-7);
  }
}

TEST(Concurrence, WernerFamily) {
  for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.9, 1.0}) {
    const Matrix w = p * oracle::bell_projector(1) + (1 - p) * Matrix::Identity(4, 4) / 4.0;
    EXPECT_NEAR(concurrence(validate_density(w, {2, 2})), std::max(0.0, 1.5 * p - 0.5), 1e-10);
  }
}

TEST(Eof, MaximallyCorrelatedExample) {
  EXPECT_NEAR(concurrence(rho_mc()), 0.5, 1e-12);
  EXPECT_NEAR(eof_two_qubit(rho_mc()).value(), 0.354579, 1e-6);
}

TEST(Eof, NumericTracksClosedForm) {
  const EofResult r = eof_numeric(rho_mc(), small_cfg(1), 4);
  EXPECT_NEAR(r.value.value(), 0.354579, 1e-4);
  EXPECT_NEAR(r.argmin.average_entanglement(), r.value.value(), 1e-9);
  EXPECT_LT(max_abs_diff(r.argmin.reconstruct(), rho_mc().matrix()), 1e-9);

  Rng rng(64);
  const DensityMatrix rho = random_mixed_state({2, 2}, rng, 2);
  const EofResult q = eof_numeric(rho, small_cfg(2), 4);
  const double exact = eof_two_qubit(rho).value();
  EXPECT_GE(q.value.value(), exact - 1e-6);
  EXPECT_NEAR(q.value.value(), exact, 2e-3);
}

TEST(Eof, PureStateNeedsNoSearch) {
  Rng rng(65);
  const Vector psi = random_pure_vector({2, 3}, rng);
  const EofResult r = eof_numeric(pure_state(psi, {2, 3}), small_cfg(3), 1);
  EXPECT_NEAR(r.value.value(), entanglement_pure(psi, {2, 3}).value(), 1e-9);
}

TEST(Ensembles, FeasibleAndCompressed) {
  Rng rng(66);
  const DensityMatrix rho = random_mixed_state({2, 2}, rng, 3);
  const PureEnsemble e = random_feasible_ensemble(rho, 12, rng);
  EXPECT_LT(max_abs_diff(e.reconstruct(), rho.matrix()), 1e-10);
  const PureEnsemble c = compress_ensemble(e);
  EXPECT_LE(c.size(), 9u);
  EXPECT_LT(max_abs_diff(c.reconstruct(), rho.matrix()), 1e-9);
  EXPECT_LE(c.average_entanglement(), e.average_entanglement() + 1e-9);

  const PureEnsemble eig = eigen_ensemble(rho);
  EXPECT_EQ(eig.size(), 3u);
  EXPECT_LT(max_abs_diff(eig.reconstruct(), rho.matrix()), 1e-12);
}

TEST(Ensembles, SchmidtDephasedIsSeparableAndKeepsMarginals) {
  Rng rng(67);
  const DensityMatrix rho = random_mixed_state({2, 3}, rng, 2);
  const PureEnsemble e = eigen_ensemble(rho);
  const SeparableEnsemble s = schmidt_dephased(e);
  const Matrix sep = s.assemble();
  EXPECT_NEAR(sep.trace().real(), 1.0, 1e-12);
  EXPECT_LT(max_abs_diff(oracle::trace_b(sep, 2, 3), oracle::trace_b(rho.matrix(), 2, 3)), 1e-12);
}

TEST(Ensembles, MakeValidates) {
  RealVector w(2);
  w << 0.6, 0.6;
  EXPECT_THROW(PureEnsemble::make({2, 2}, w, {ket(4, 0), ket(4, 1)}), ValidationError);
  w << 0.5, 0.5;
  EXPECT_THROW(PureEnsemble::make({2, 2}, w, {ket(4, 0), 2.0 * ket(4, 1)}), ValidationError);
}

TEST(MaxCorr, BuildsExampleState) {
  Matrix star(2, 2);
  star << 0.5, 0.25, 0.25, 0.5;
  const DensityMatrix mc = max_corr_state(validate_density(star, {2}));
  EXPECT_LT(max_abs_diff(mc.matrix(), oracle::rho_mc()), 1e-15);
  EXPECT_NEAR(ere_max_corr(mc).value(), 0.188722, 1e-6);
  EXPECT_NEAR(ere_max_corr(mc).value(), 1.0 - oracle::h2(0.75), 1e-13);
}

TEST(MaxCorr, RejectsOtherStates) {
  Rng rng(68);
  EXPECT_THROW(ere_max_corr(random_mixed_state({2, 2}, rng)), ValidationError);
}

TEST(Ere, BoundsOnKnownStates) {
  const EreResult mc = ere_numeric(rho_mc(), small_cfg(4), 4);
  EXPECT_NEAR(mc.value.value(), 0.188722, 1e-3);
  EXPECT_LT(max_abs_diff(mc.argmin.assemble(), mc.argmin.assemble().adjoint()), 1e-14);

  const EreResult bell = ere_numeric(bell_state(), small_cfg(5), 4);
  EXPECT_NEAR(bell.value.value(), 1.0, 1e-3);

  Rng rng(69);
  const DensityMatrix prod = tensor(random_mixed_state({2}, rng), random_mixed_state({2}, rng));
  EXPECT_NEAR(ere_numeric(prod, small_cfg(6), 4).value.value(), 0.0, 1e-6);
}

TEST(Ere, BelowFormation) {
  Rng rng(70);
  for (int t = 0; t < 3; ++t) {
    const DensityMatrix rho = random_mixed_state({2, 2}, rng);
    const EreResult r = ere_numeric(rho, small_cfg(10 + t), 4);
    EXPECT_LE(r.value.value(), eof_two_qubit(rho).value() + 2e-3);
  }
}

TEST(Eof, NumericNeverBeatsClosedFormAndUsuallyMatches) {
  Rng rng(71);
  const int n = 100;
  int matched = 0;
  for (int t = 0; t < n; ++t) {
    const DensityMatrix rho = random_mixed_state({2, 2}, rng, 1 + t % 4);
    const int rank = static_cast<int>(eigen_ensemble(rho).size());
    const double exact = eof_two_qubit(rho).value();
    const double num = eof_numeric(rho, small_cfg(100 + t, 2), rank * rank).value.value();
    EXPECT_GE(num, exact - 1e-4);
    matched += std::abs(num - exact) <= 1e-4;
  }
  EXPECT_GE(matched, 90);
}

TEST(Eof, LocalUnitaryInvariance) {
  Rng rng(72);
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = random_mixed_state({2, 2}, rng);
    const Matrix u = oracle::kron(haar_unitary(2, rng), haar_unitary(2, rng));
    const DensityMatrix moved = validate_density(u * rho.matrix() * u.adjoint(), {2, 2});
    EXPECT_NEAR(eof_two_qubit(rho).value(), eof_two_qubit(moved).value(), 1e-8);
  }
}

TEST(Ere, BelowNumericFormation) {
  Rng rng(73);
  for (int t = 0; t < 4; ++t) {
    const DensityMatrix rho = random_mixed_state({2, 2}, rng, 2 + t % 3);
    const int rank = static_cast<int>(eigen_ensemble(rho).size());
    const double ef = eof_numeric(rho, small_cfg(30 + t), rank * rank).value.value();
    EXPECT_LE(ere_numeric(rho, small_cfg(40 + t), 4).value.value(), ef + 1e-4);
  }
}

TEST(Ere, MatchesMaxCorrelatedClosedForm) {
  Rng rng(74);
  for (int t = 0; t < 4; ++t) {
    const DensityMatrix mc = max_corr_state(random_mixed_state({2 + t % 2}, rng));
    EXPECT_NEAR(ere_numeric(mc, small_cfg(50 + t), mc.dim()).value.value(), ere_max_corr(mc).value(), 1e-3);
  }
}
