#pragma once
// Brute-force reference implementations for the tests. Nothing here calls
// into the library, so agreement is an independent check.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;
using V = Eigen::VectorXcd;

inline M kron(const M& a, const M& b) {
  M out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int ip = 0; ip < a.cols(); ++ip)
      for (int j = 0; j < b.rows(); ++j)
        for (int jp = 0; jp < b.cols(); ++jp) out(i * b.rows() + j, ip * b.cols() + jp) = a(i, ip) * b(j, jp);
  return out;
}

// Tr_B of a da*db operator.
inline M trace_b(const M& m, int da, int db) {
  M out = M::Zero(da, da);
  for (int i = 0; i < da; ++i)
    for (int ip = 0; ip < da; ++ip)
      for (int j = 0; j < db; ++j) out(i, ip) += m(i * db + j, ip * db + j);
  return out;
}

inline M trace_a(const M& m, int da, int db) {
  M out = M::Zero(db, db);
  for (int j = 0; j < db; ++j)
    for (int jp = 0; jp < db; ++jp)
      for (int i = 0; i < da; ++i) out(j, jp) += m(i * db + j, i * db + jp);
  return out;
}

inline double xlog2x(double x) { return x > 1e-300 ? x * std::log2(x) : 0.0; }

inline double h2(double p) { return -xlog2x(p) - xlog2x(1.0 - p); }

inline double shannon(const Eigen::VectorXd& p) {
  double s = 0.0;
  for (int i = 0; i < p.size(); ++i) s -= xlog2x(p[i]);
  return s;
}

inline double entropy(const M& rho) {
  Eigen::SelfAdjointEigenSolver<M> es(rho);
  return shannon(es.eigenvalues().cwiseMax(0.0));
}

// Matrix logarithm (base 2) of a full-rank PSD matrix.
inline M log2m(const M& s) {
  Eigen::SelfAdjointEigenSolver<M> es(s);
  Eigen::VectorXd l = es.eigenvalues().unaryExpr([](double x) { return std::log2(x); });
  return es.eigenvectors() * l.asDiagonal() * es.eigenvectors().adjoint();
}

// Requires full-rank sigma.
inline double relative_entropy(const M& rho, const M& sigma) {
  return -entropy(rho) - (rho * log2m(sigma)).trace().real();
}

// Product unitary for per-subsystem bases, via repeated kron.
inline M product(const std::vector<M>& us) {
  M u = M::Identity(1, 1);
  for (const auto& x : us) u = kron(u, x);
  return u;
}

// C_re = S(diag(U^dag rho U)) - S(rho).
inline double coherence(const M& rho, const M& u) {
  const M r = u.adjoint() * rho * u;
  Eigen::VectorXd d(r.rows());
  for (int i = 0; i < r.rows(); ++i) d[i] = r(i, i).real();
  return shannon(d) - entropy(rho);
}

inline M dephase(const M& rho, const M& u) {
  const M r = u.adjoint() * rho * u;
  M d = M::Zero(r.rows(), r.cols());
  for (int i = 0; i < r.rows(); ++i) d(i, i) = r(i, i);
  return u * d * u.adjoint();
}

inline M random_unitary(int d, std::mt19937_64& g) {
  std::normal_distribution<double> n;
  M z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = C(n(g), n(g));
  Eigen::HouseholderQR<M> qr(z);
  M q = qr.householderQ() * M::Identity(d, d);
  M r = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    const C ph = r(j, j) / std::abs(r(j, j));
    q.col(j) *= ph;
  }
  return q;
}

inline M random_density(int d, std::mt19937_64& g, int rank = 0) {
  std::normal_distribution<double> n;
  if (rank <= 0) rank = d;
  M z(d, rank);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < rank; ++j) z(i, j) = C(n(g), n(g));
  M r = z * z.adjoint();
  return r / r.trace().real();
}

inline V random_unit(int d, std::mt19937_64& g) {
  std::normal_distribution<double> n;
  V v(d);
  for (int i = 0; i < d; ++i) v[i] = C(n(g), n(g));
  return v / v.norm();
}

// Entanglement entropy of a bipartite pure vector via the reduced state.
inline double pure_entanglement(const V& psi, int da, int db) {
  return entropy(trace_b(psi * psi.adjoint(), da, db));
}

// Wootters concurrence: decreasing square roots of eig(rho rho~).
inline double concurrence(const M& rho) {
  M yy = M::Zero(4, 4);
  yy(0, 3) = -1;
  yy(1, 2) = 1;
  yy(2, 1) = 1;
  yy(3, 0) = -1;
  const M tilde = yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<M> es(rho * tilde);
  std::vector<double> l;
  for (int i = 0; i < 4; ++i) l.push_back(std::sqrt(std::max(0.0, es.eigenvalues()[i].real())));
  std::sort(l.rbegin(), l.rend());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

inline double eof_from_concurrence(double c) { return h2(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c)))); }

inline M bell_projector(int sign) {
  V v = V::Zero(4);
  v[0] = 1.0 / std::sqrt(2.0);
  v[3] = sign / std::sqrt(2.0);
  return v * v.adjoint();
}

// 3/4 Phi+ + 1/4 Phi-.
inline M rho_mc() { return 0.75 * bell_projector(1) + 0.25 * bell_projector(-1); }

}  // namespace oracle
