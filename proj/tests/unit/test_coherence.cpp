#include <coherekit/coherence.hpp>
#include <coherekit/states.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace coherekit;

namespace {

Matrix product_unitary(const BasisList& b) {
  std::vector<Matrix> us;
  for (const auto& x : b) us.push_back(x.columns());
  return oracle::product(us);
}

DensityMatrix rho_mc() { return validate_density(oracle::rho_mc(), {2, 2}); }

}  // namespace

TEST(CoherenceRe, MatchesDiagonalEntropyOracle) {
  Rng rng(41);
  for (int t = 0; t < 30; ++t) {
    const Dims dims = t % 3 == 0 ? Dims{3} : (t % 3 == 1 ? Dims{2, 2} : Dims{2, 3});
    const DensityMatrix rho = random_mixed_state(dims, rng, 1 + t % 3);
    const BasisList bases = random_bases(dims, rng);
    EXPECT_NEAR(coherence_re(rho, bases).value(), oracle::coherence(rho.matrix(), product_unitary(bases)), 1e-11);
  }
}

TEST(CoherenceRe, KnownStates) {
  EXPECT_NEAR(coherence_re(rho_mc(), computational_bases({2, 2})).value(), 0.188722, 1e-6);
  EXPECT_NEAR(coherence_re(rho_mc(), computational_bases({2, 2})).value(), 1.0 - oracle::h2(0.75), 1e-13);
  const Vector plus = Vector::Constant(3, 1.0 / std::sqrt(3.0));
  EXPECT_NEAR(coherence_re(pure_state(plus, {3}), computational_bases({3})).value(), std::log2(3.0), 1e-13);
  EXPECT_EQ(coherence_re(maximally_mixed({2, 3}), computational_bases({2, 3})).value(), 0.0);
}

TEST(CoherenceRe, SingleQubitClosedForm) {
  // r = Bloch vector; C = h((1+z)/2) - h((1+|r|)/2).
  Rng rng(42);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = random_mixed_state({2}, rng);
    const Matrix& m = rho.matrix();
    const double x = 2 * m(0, 1).real(), y = -2 * m(0, 1).imag(), z = (m(0, 0) - m(1, 1)).real();
    const double r = std::sqrt(x * x + y * y + z * z);
    const double expect = oracle::h2((1 + z) / 2) - oracle::h2((1 + r) / 2);
    EXPECT_NEAR(coherence_re(rho, computational_bases({2})).value(), expect, 1e-6);
  }
}

TEST(CoherenceRe, EqualsMinimumOverIncoherentStates) {
  Rng rng(43);
  for (int t = 0; t < 4; ++t) {
    const Dims dims = t % 2 ? Dims{3} : Dims{2, 2};
    const DensityMatrix rho = random_mixed_state(dims, rng);
    const BasisList bases = random_bases(dims, rng);
    OptimizerConfig cfg;
    cfg.restarts = 6;
    cfg.seed = t;
    const OracleResult o = coherence_re_min_oracle(rho, bases, cfg);
    EXPECT_NEAR(o.value.value(), coherence_re(rho, bases).value(), 1e-6);
  }
}

TEST(Evaluator, AgreesWithDirect) {
  Rng rng(44);
  const DensityMatrix rho = random_mixed_state({2, 3}, rng, 2);
  const CoherenceEvaluator ev(rho.matrix(), rho.dims());
  for (int t = 0; t < 10; ++t) {
    const BasisList bases = random_bases({2, 3}, rng);
    EXPECT_NEAR(ev(bases), coherence_re(rho, bases).value(), 1e-11);
    const Matrix d = dephase_parties(rho.matrix(), rho.dims(), bases, {1});
    EXPECT_NEAR(ev.partial(bases, {1}), oracle::entropy(d) - oracle::entropy(rho.matrix()), 1e-10);
  }
}

TEST(Correlated, BellIsOne) {
  EXPECT_NEAR(correlated_coherence(BipartiteFrame(bell_state())).value(), 1.0, 1e-14);
}

TEST(Correlated, PaperQutritVanishesWithLocalCoherence) {
  const DensityMatrix rho = paper_qutrit_example();
  EXPECT_NEAR(correlated_coherence(BipartiteFrame(rho)).value(), 0.0, 1e-9);
  EXPECT_GT(coherence_re(partial_trace(rho, {0}), computational_bases({3})).value(), 0.01);
  EXPECT_GT(coherence_re(partial_trace(rho, {1}), computational_bases({3})).value(), 0.01);
}

TEST(Correlated, ProductStatesVanish) {
  Rng rng(45);
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = tensor(random_mixed_state({2}, rng), random_mixed_state({3}, rng));
    const BasisList b = random_bases({2, 3}, rng);
    EXPECT_NEAR(correlated_coherence(BipartiteFrame(rho, b[0], b[1])).value(), 0.0, 1e-10);
  }
}

TEST(Correlated, SuperadditivityProperty) {
  Rng rng(46);
  for (int t = 0; t < 200; ++t) {
    const Dims dims = t % 2 ? Dims{2, 3} : Dims{2, 2};
    const DensityMatrix rho = random_mixed_state(dims, rng);
    const BasisList b = random_bases(dims, rng);
    const Matrix u = product_unitary(b);
    const double raw = oracle::coherence(rho.matrix(), u) -
                       oracle::coherence(oracle::trace_b(rho.matrix(), dims[0], dims[1]), b[0].columns()) -
                       oracle::coherence(oracle::trace_a(rho.matrix(), dims[0], dims[1]), b[1].columns());
    EXPECT_GE(raw, -1e-9);
    EXPECT_NEAR(correlated_coherence(BipartiteFrame(rho, b[0], b[1])).value(), std::max(raw, 0.0), 1e-10);
  }
}

TEST(Correlated, InvariantUnderLocalBasisPermutation) {
  Rng rng(47);
  const DensityMatrix rho = random_mixed_state({2, 2}, rng);
  const BasisList b = random_bases({2, 2}, rng);
  Matrix swapped = b[0].columns();
  swapped.col(0).swap(swapped.col(1));
  const double a = correlated_coherence(BipartiteFrame(rho, b[0], b[1])).value();
  const double c = correlated_coherence(BipartiteFrame(rho, LocalBasis(swapped), b[1])).value();
  EXPECT_NEAR(a, c, 1e-12);
}

TEST(Correlated, EvaluatorMultipartyGhz) {
  const CorrelatedCoherenceEvaluator ev(ghz_state(3));
  EXPECT_EQ(ev.parties(), 3);
  EXPECT_NEAR(ev(computational_bases({2, 2, 2})), 1.0, 1e-13);
}

TEST(Correlated, ClampPolicy) {
  EXPECT_EQ(clamp_correlated(-5e-10).value(), 0.0);
  EXPECT_THROW(clamp_correlated(-1e-6), InternalError);
}

TEST(Correlated, RelativeEntropyForm) {
  Rng rng(48);
  for (int t = 0; t < 30; ++t) {
    const Dims dims = t % 2 ? Dims{2, 3} : Dims{2, 2};
    const DensityMatrix rho = random_mixed_state(dims, rng);
    const BasisList b = random_bases(dims, rng);
    const DensityMatrix ra = partial_trace(rho, {0}), rb = partial_trace(rho, {1});
    const double form = relative_entropy(rho, tensor(ra, rb)).value() -
                        relative_entropy(dephase(rho, b), tensor(dephase(ra, {b[0]}), dephase(rb, {b[1]}))).value();
    EXPECT_NEAR(correlated_coherence(BipartiteFrame(rho, b[0], b[1])).value(), form, 1e-8);
  }
}

TEST(Correlated, LocalUnitaryCovariance) {
  Rng rng(49);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = random_mixed_state({2, 3}, rng);
    const BasisList b = random_bases({2, 3}, rng);
    const Matrix ua = haar_unitary(2, rng), ub = haar_unitary(3, rng);
    const Matrix u = oracle::kron(ua, ub);
    const DensityMatrix moved = validate_density(u * rho.matrix() * u.adjoint(), {2, 3});
    const double before = correlated_coherence(BipartiteFrame(rho, b[0], b[1])).value();
    const double after =
        correlated_coherence(BipartiteFrame(moved, LocalBasis(ua * b[0].columns()), LocalBasis(ub * b[1].columns())))
            .value();
    EXPECT_NEAR(before, after, 1e-9);
  }
}
