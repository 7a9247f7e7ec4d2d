#include <coherekit/coherence.hpp>
#include <coherekit/entanglement.hpp>
#include <coherekit/eoc.hpp>
#include <coherekit/states.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace coherekit;

namespace {

DensityMatrix rho_mc() { return validate_density(oracle::rho_mc(), {2, 2}); }

OptimizerConfig small_cfg(std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.restarts = 3;
  cfg.seed = seed;
  return cfg;
}

EocOptions small_opts(const DensityMatrix& rho) {
  EocOptions o;
  const int rank = static_cast<int>(eigen_ensemble(rho).size());
  o.eof_ensemble_size = rank * rank;
  o.ere_ensemble_size = rho.dim();
  o.random_candidates = 4;
  return o;
}

// Marginals of the extension traced down to the original pair.
Matrix reduce_extension(const ExtensionWitness& w) {
  const auto& p = w.partition;
  const Dims full{p.da, p.da_ext, p.db, p.db_ext};
  return partial_trace(w.state.matrix(), full, {0, 2});
}

}  // namespace

TEST(Delta, EqualsAverageEntanglement) {
  Rng rng(71);
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = random_mixed_state({2, 2}, rng, 1 + t % 4);
    const PureEnsemble e = random_feasible_ensemble(rho, 1 + t % 3 + static_cast<int>(eigen_ensemble(rho).size()), rng);
    const ExtensionWitness w = delta_extension(e);
    EXPECT_TRUE(verify_unitary_symmetry(w));
    EXPECT_NEAR(cc_of_extension(w).value(), e.average_entanglement(), 1e-7);
    EXPECT_LT(max_abs_diff(reduce_extension(w), rho.matrix()), 1e-9);
  }
}

TEST(Delta, MixedDimensions) {
  Rng rng(72);
  const DensityMatrix rho = random_mixed_state({2, 3}, rng, 2);
  const PureEnsemble e = eigen_ensemble(rho);
  const ExtensionWitness w = delta_extension(e);
  EXPECT_EQ(w.partition.da * w.partition.da_ext, w.partition.db * w.partition.db_ext);
  EXPECT_TRUE(verify_unitary_symmetry(w));
  EXPECT_NEAR(cc_of_extension(w).value(), e.average_entanglement(), 1e-7);
}

TEST(Trivial, MaxCorrelatedIsSymmetric) {
  const ExtensionWitness w = trivial_extension(rho_mc());
  EXPECT_TRUE(verify_unitary_symmetry(w));
  EXPECT_NEAR(cc_of_extension(w).value(), 0.188722, 1e-6);
}

TEST(Trivial, GenericStateIsRejected) {
  Rng rng(73);
  const ExtensionWitness w = trivial_extension(random_mixed_state({2, 3}, rng));
  EXPECT_FALSE(verify_unitary_symmetry(w));
  EXPECT_THROW(cc_of_extension(w), ValidationError);
}

TEST(TensorExt, Additive) {
  Rng rng(74);
  const ExtensionWitness a = trivial_extension(rho_mc());
  const ExtensionWitness b = delta_extension(eigen_ensemble(random_pure_state({2, 2}, rng)));
  const ExtensionWitness ab = tensor_extension(a, b);
  EXPECT_TRUE(verify_unitary_symmetry(ab));
  EXPECT_NEAR(cc_of_extension(ab).value(), cc_of_extension(a).value() + cc_of_extension(b).value(), 1e-8);
}

TEST(Degenerate, RotationsKeepSymmetry) {
  const ExtensionWitness w = trivial_extension(bell_state());
  Rng rng(75);
  const auto rots = degenerate_rotations(w, 3, rng);
  EXPECT_EQ(rots.size(), 3u);
  for (const auto& r : rots) EXPECT_TRUE(verify_unitary_symmetry(r));
}

TEST(Bounds, MaxCorrelatedExample) {
  const DensityMatrix mc = rho_mc();
  const BoundsReport r = eoc_upper_bound(mc, small_cfg(1), small_opts(mc));
  EXPECT_NEAR(r.eoc_upper.value(), 0.188722, 2e-3);
  EXPECT_NEAR(r.e_re_lower.value(), 0.188722, 2e-3);
  EXPECT_NEAR(r.e_f.value(), 0.354579, 1e-6);
  EXPECT_LT(r.eoc_upper.value(), r.e_f.value() - 0.1);
  EXPECT_TRUE(r.ordering_ok);
}

TEST(Bounds, PureStateCollapse) {
  Rng rng(76);
  const Vector psi = random_pure_vector({2, 3}, rng);
  const DensityMatrix rho = pure_state(psi, {2, 3});
  const BoundsReport r = eoc_upper_bound(rho, small_cfg(2), small_opts(rho));
  const double e = entanglement_pure(psi, {2, 3}).value();
  EXPECT_NEAR(r.e_f.value(), e, 2e-3);
  EXPECT_NEAR(r.eoc_upper.value(), e, 2e-3);
  EXPECT_NEAR(r.e_re_lower.value(), e, 2e-3);
}

TEST(Bounds, SandwichOnRandomQubits) {
  Rng rng(77);
  for (int t = 0; t < 2; ++t) {
    const DensityMatrix rho = random_mixed_state({2, 2}, rng);
    const BoundsReport r = eoc_upper_bound(rho, small_cfg(3 + t), small_opts(rho));
    ASSERT_TRUE(r.eoc_upper.is_finite());
    EXPECT_LE(r.e_re_lower.value(), r.eoc_upper.value() + 2e-3);
    EXPECT_LE(r.eoc_upper.value(), eof_two_qubit(rho).value() + 2e-3);
  }
}

TEST(Subadditivity, MaxCorrelatedPair) {
  Rng rng(78);
  const DensityMatrix tau = random_pure_state({2, 2}, rng);
  const SubadditivityReport r = eoc_subadditivity_report(rho_mc(), tau, small_cfg(4));
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.symmetric);
  EXPECT_NEAR(r.combined, r.first + r.second, 1e-8);
}

TEST(Bounds, EveryWitnessAboveRelativeEntropy) {
  Rng rng(79);
  for (int t = 0; t < 3; ++t) {
    const DensityMatrix rho = random_mixed_state({2, 2}, rng);
    const double ere = ere_numeric(rho, small_cfg(60 + t), 4).value.value();
    for (int k = 0; k < 5; ++k) {
      const ExtensionWitness w = delta_extension(random_feasible_ensemble(rho, 4 + k, rng));
      EXPECT_GE(cc_of_extension(w).value(), ere - 2e-3);
    }
  }
}

TEST(Bounds, MaxCorrelatedAttainedByTrivialExtension) {
  Rng rng(80);
  for (int t = 0; t < 4; ++t) {
    const DensityMatrix mc = max_corr_state(random_mixed_state({2 + t % 2}, rng));
    const BoundsReport r = eoc_upper_bound(mc, small_cfg(70 + t), small_opts(mc));
    EXPECT_TRUE(r.trivial_symmetric);
    EXPECT_NEAR(r.eoc_upper.value(), ere_max_corr(mc).value(), 2e-3);
    const ExtensionWitness w = trivial_extension(mc);
    EXPECT_NEAR(cc_of_extension(w).value(), ere_max_corr(mc).value(), 1e-9);
  }
}
