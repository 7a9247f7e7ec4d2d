#include <coherekit/coherence.hpp>
#include <coherekit/discord.hpp>
#include <coherekit/states.hpp>
#include <coherekit/structure.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace coherekit;

TEST(Support, DiagonalReadout) {
  // 2/3|0><0| + 1/3|+02><+02|.
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 2.0 / 3.0 + 1.0 / 6.0;
  m(2, 2) = 1.0 / 6.0;
  m(0, 2) = m(2, 0) = 1.0 / 6.0;
  EXPECT_EQ(coherence_support(validate_density(m, {3}), LocalBasis::computational(3)), (IndexSet{0, 2}));
}

TEST(Decomposition, PaperQutritVerifies) {
  const DensityMatrix rho = paper_qutrit_example();
  const BasisList b = computational_bases({3, 3});
  EXPECT_TRUE(verify_cc_decomposition(rho, paper_qutrit_decomposition(), b));
  const auto found = detect_cc_structure(rho, b);
  ASSERT_TRUE(found.has_value());
  EXPECT_TRUE(verify_cc_decomposition(rho, *found, b));
  EXPECT_LT(max_abs_diff(found->reconstruct(), rho.matrix()), 1e-9);
}

TEST(Decomposition, RejectsOverlappingSupports) {
  CCDecomposition d = paper_qutrit_decomposition();
  const DensityMatrix rho = paper_qutrit_example();
  ASSERT_GE(d.a_supports.size(), 2u);
  d.a_supports[1] = d.a_supports[0];
  EXPECT_FALSE(verify_cc_decomposition(rho, d, computational_bases({3, 3})));
}

TEST(Detect, FindsConstructedStates) {
  Rng rng(81);
  for (int t = 0; t < 30; ++t) {
    const int da = 2 + t % 2, db = 2 + (t / 2) % 2;
    const ConstructedCC c = random_cc_state(da, db, rng);
    EXPECT_TRUE(verify_cc_decomposition(c.state, c.decomposition, c.bases));
    EXPECT_NEAR(correlated_coherence(BipartiteFrame(c.state, c.bases[0], c.bases[1])).value(), 0.0, 1e-8);
    const auto found = detect_cc_structure(c.state, c.bases);
    ASSERT_TRUE(found.has_value()) << "item " << t;
    EXPECT_TRUE(verify_cc_decomposition(c.state, *found, c.bases));
  }
}

TEST(Detect, RejectsCorrelatedStates) {
  Rng rng(82);
  int checked = 0;
  for (int t = 0; t < 30; ++t) {
    const Dims dims = t % 2 ? Dims{2, 3} : Dims{2, 2};
    const DensityMatrix rho = random_mixed_state(dims, rng);
    const BasisList b = random_bases(dims, rng);
    if (correlated_coherence(BipartiteFrame(rho, b[0], b[1])).value() <= 1e-4) continue;
    ++checked;
    EXPECT_FALSE(detect_cc_structure(rho, b).has_value());
  }
  EXPECT_GT(checked, 20);
}

TEST(Theorem1, DisjointSupportStateIsInvariant) {
  Rng rng(83);
  for (int t = 0; t < 10; ++t) {
    const ConstructedCC c = random_cc_state(2, 3, rng);
    const Theorem1Report r = theorem1_invariance_check(BipartiteFrame(c.state, c.bases[0], c.bases[1]));
    EXPECT_TRUE(r.invariant);
    EXPECT_NEAR(r.difference, r.discord, 1e-8);
  }
}

TEST(Theorem1, BellDropsByOne) {
  const Theorem1Report r = theorem1_invariance_check(BipartiteFrame(bell_state()));
  EXPECT_NEAR(r.cc_before, 1.0, 1e-13);
  EXPECT_NEAR(r.cc_after, 0.0, 1e-13);
  EXPECT_NEAR(r.difference, 1.0, 1e-13);
  EXPECT_NEAR(r.discord, 1.0, 1e-13);
  EXPECT_FALSE(r.invariant);
}

TEST(Petz, FixedPointOfRandomState) {
  Rng rng(84);
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix sigma = random_mixed_state({2, 2}, rng);
    const RecoveryChannel rc{sigma, random_bases({2, 2}, rng), {0, 1}};
    const Matrix es = apply_channel(rc, sigma.matrix());
    EXPECT_LT(max_abs_diff(petz_recovery(rc, es), sigma.matrix()), 1e-9);
  }
}

TEST(Petz, IdentityChannelIsIdentity) {
  Rng rng(85);
  const DensityMatrix sigma = random_mixed_state({2, 2}, rng);
  const DensityMatrix x = random_mixed_state({2, 2}, rng);
  const RecoveryChannel rc{sigma, computational_bases({2, 2}), {}};
  EXPECT_LT(max_abs_diff(apply_channel(rc, x.matrix()), x.matrix()), 1e-15);
  EXPECT_LT(max_abs_diff(petz_recovery(rc, x.matrix()), x.matrix()), 1e-9);
}

TEST(Petz, RecoversClassicalClassicalState) {
  Rng rng(86);
  for (int t = 0; t < 10; ++t) {
    const ConstructedCC c = random_cc_state(2 + t % 2, 2, rng);
    const DensityMatrix product = tensor(partial_trace(c.state, {0}), partial_trace(c.state, {1}));
    const RecoveryChannel rc{product, c.bases, {0, 1}};
    const Matrix measured = dephase(c.state, c.bases).matrix();
    EXPECT_LT(max_abs_diff(petz_recovery(rc, measured), c.state.matrix()), 1e-8);
  }
}

TEST(Petz, OutputIsTracePreservingAndPositive) {
  Rng rng(87);
  const DensityMatrix sigma = random_mixed_state({2, 2}, rng);
  const DensityMatrix x = random_mixed_state({2, 2}, rng);
  const RecoveryChannel rc{sigma, random_bases({2, 2}, rng), {1}};
  const Matrix r = petz_recovery(rc, apply_channel(rc, x.matrix()));
  EXPECT_NEAR(r.trace().real(), 1.0, 1e-9);
  Eigen::SelfAdjointEigenSolver<Matrix> es(r);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10);
}

TEST(Petz, SupportMismatchThrows) {
  Matrix p = Matrix::Zero(2, 2);
  p(0, 0) = 1.0;
  const RecoveryChannel rc{validate_density(p, {2}), computational_bases({2}), {0}};
  try {
    petz_recovery(rc, Matrix::Identity(2, 2) / 2.0);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.violation(), Violation::SupportMismatch);
  }
}

TEST(RatioCheck, PaperQutritPasses) {
  const RatioCheckReport r = appendix_ratio_check(paper_qutrit_example(), computational_bases({3, 3}));
  EXPECT_TRUE(r.form_matches);
  if (r.applicable) EXPECT_TRUE(r.passed) << r.max_violation;
}

TEST(RatioCheck, ClassicalPassesPerturbedFails) {
  Rng rng(88);
  int perturbed = 0;
  for (int t = 0; t < 20; ++t) {
    const ConstructedCC c = random_cc_state(2 + t % 2, 2, rng, true);
    const auto form = classical_classical_form(c.state);
    ASSERT_TRUE(form.has_value());
    const RatioCheckReport r = appendix_ratio_check(*form, c.bases);
    EXPECT_TRUE(r.applicable);
    EXPECT_TRUE(r.passed) << r.max_violation;

    const ClassicalClassicalForm p = bell_perturbed_form(*form, 0.05);
    const DensityMatrix ps = validate_density(p.reconstruct(), c.state.dims());
    if (correlated_coherence(BipartiteFrame(ps, c.bases[0], c.bases[1])).value() <= 1e-6) continue;
    ++perturbed;
    EXPECT_FALSE(appendix_ratio_check(p, c.bases).passed);
  }
  EXPECT_GT(perturbed, 5);
}

TEST(RatioCheck, RejectsStatesWithoutForm) {
  const RatioCheckReport r = appendix_ratio_check(bell_state(), computational_bases({2, 2}));
  EXPECT_FALSE(r.passed);
}

TEST(RatioCheck, RankDeficientMarginalIsNotApplicable) {
  ClassicalClassicalForm f;
  f.lambda = Eigen::MatrixXd::Zero(2, 2);
  f.lambda(0, 0) = 0.5;
  f.lambda(0, 1) = 0.5;
  f.psi = Matrix::Identity(2, 2);
  f.phi = Matrix::Identity(2, 2);
  const RatioCheckReport r = appendix_ratio_check(f, computational_bases({2, 2}));
  EXPECT_FALSE(r.applicable);
  EXPECT_FALSE(r.passed);
}

TEST(Construct, FullRankMarginals) {
  Rng rng(89);
  for (int t = 0; t < 10; ++t) {
    const ConstructedCC c = random_cc_state(3, 3, rng, true);
    EXPECT_GT(spectrum(partial_trace(c.state, {0}).matrix()).minCoeff(), 1e-12);
    EXPECT_GT(spectrum(partial_trace(c.state, {1}).matrix()).minCoeff(), 1e-12);
  }
}

TEST(Detect, RelativeEntropyConditionOnCorpus) {
  Rng rng(90);
  for (int t = 0; t < 30; ++t) {
    const ConstructedCC c = random_cc_state(2 + t % 2, 2 + (t / 2) % 2, rng);
    const DensityMatrix ra = partial_trace(c.state, {0}), rb = partial_trace(c.state, {1});
    const double before = relative_entropy(c.state, tensor(ra, rb)).value();
    const double after = relative_entropy(dephase(c.state, c.bases),
                                          tensor(dephase(ra, {c.bases[0]}), dephase(rb, {c.bases[1]})))
                             .value();
    EXPECT_NEAR(before, after, 1e-8);
  }
}

TEST(Detect, QubitPairsAreProductOrIncoherent) {
  Rng rng(91);
  for (int t = 0; t < 30; ++t) {
    const ConstructedCC c = random_cc_state(2, 2, rng);
    const auto d = detect_cc_structure(c.state, c.bases);
    ASSERT_TRUE(d.has_value());
    const DensityMatrix ra = partial_trace(c.state, {0}), rb = partial_trace(c.state, {1});
    const bool product = max_abs_diff(c.state.matrix(), tensor(ra, rb).matrix()) <= 1e-9;
    const bool incoherent = max_abs_diff(dephase(c.state, c.bases).matrix(), c.state.matrix()) <= 1e-9;
    EXPECT_TRUE(product || incoherent) << "item " << t;
  }
}
