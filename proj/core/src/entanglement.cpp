#include "coherekit/entanglement.hpp"

#include "coherekit/parallel.hpp"
#include "coherekit/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace coherekit {

namespace {

constexpr double kWeightFloor = 1e-14;
constexpr double kSpreadTol = 1e-5;
constexpr double kEreEpsilon = 1e-9;
constexpr double kLogitClamp = 50.0;
const double kLn2 = std::log(2.0);

void require_bipartite(const DensityMatrix& rho) {
  if (rho.parties() != 2) throw DimensionError("bipartite state required");
}

double xlog2x_sum(double a, double b) {
  double h = 0.0;
  if (a > 0.0) h -= a * std::log2(a);
  if (b > 0.0) h -= b * std::log2(b);
  return h;
}

// Spectral square root: columns sqrt(lambda_j) v_j over the support.
Matrix spectral_root(const DensityMatrix& rho) {
  const EigDecomposition eig = eig_hermitian(rho.matrix());
  int r = 0;
  while (r < eig.eigenvalues.size() && eig.eigenvalues[r] > kSupportEigenTol) ++r;
  Matrix w(rho.dim(), r);
  for (int j = 0; j < r; ++j) w.col(j) = eig.eigenvectors.col(j) * std::sqrt(eig.eigenvalues[j]);
  return w;
}

PureEnsemble ensemble_from_columns(const Matrix& members, const Dims& dims) {
  std::vector<double> w;
  std::vector<Vector> states;
  for (Eigen::Index i = 0; i < members.cols(); ++i) {
    const double n2 = members.col(i).squaredNorm();
    if (n2 <= kWeightFloor) continue;
    w.push_back(n2);
    states.push_back(members.col(i) / std::sqrt(n2));
  }
  RealVector weights = Eigen::Map<RealVector>(w.data(), static_cast<Eigen::Index>(w.size()));
  weights /= weights.sum();
  return PureEnsemble::make(dims, std::move(weights), std::move(states));
}

}  // namespace

PureEnsemble PureEnsemble::make(Dims dims, RealVector weights, std::vector<Vector> states) {
  if (dims.size() != 2) throw DimensionError("ensemble must be bipartite");
  const int d = total_dim(dims);
  if (weights.size() != static_cast<Eigen::Index>(states.size()) || states.empty()) {
    throw DimensionError("ensemble weights and states differ in length");
  }
  if (weights.minCoeff() < -1e-12 || std::abs(weights.sum() - 1.0) > 1e-10) {
    throw ValidationError(Violation::InvalidDistribution, "ensemble weights are not a probability vector");
  }
  for (const Vector& v : states) {
    if (v.size() != d) throw DimensionError("ensemble state has wrong dimension");
    if (std::abs(v.norm() - 1.0) > 1e-10) throw ValidationError(Violation::NotUnitNorm, "ensemble state is not unit norm");
  }
  PureEnsemble e;
  e.dims = std::move(dims);
  e.weights = weights.cwiseMax(0.0);
  e.states = std::move(states);
  return e;
}

Matrix PureEnsemble::reconstruct() const {
  const int d = total_dim(dims);
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < states.size(); ++i) {
    m.noalias() += weights[static_cast<Eigen::Index>(i)] * states[i] * states[i].adjoint();
  }
  return m;
}

double PureEnsemble::average_entanglement() const {
  double e = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    e += weights[static_cast<Eigen::Index>(i)] * weighted_entanglement(states[i], dims[0], dims[1]);
  }
  return e;
}

Matrix SeparableEnsemble::assemble() const {
  const int d = total_dim(dims);
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < a_states.size(); ++k) {
    const Vector v = tensor(Matrix(a_states[k]), Matrix(b_states[k])).col(0);
    m.noalias() += weights[static_cast<Eigen::Index>(k)] * v * v.adjoint();
  }
  return m;
}

double weighted_entanglement(const Vector& v, int da, int db) {
  const double n = v.squaredNorm();
  if (n <= 1e-300) return 0.0;
  if (da == 2 && db == 2) {
    const double det = std::norm(v[0] * v[3] - v[1] * v[2]);
    const double disc = std::sqrt(std::max(0.0, n * n - 4.0 * det));
    const double l1 = 0.5 * (n + disc);
    const double l2 = std::max(0.0, det / l1);  // l1 l2 = det, stable for small l2
    return xlog2x_sum(l1 / n, l2 / n) * n;
  }
  const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(v.data(), da, db);
  const Matrix g = da <= db ? Matrix(m * m.adjoint()) : Matrix(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double x = es.eigenvalues()[k] / n;
    if (x > 0.0) h -= x * std::log2(x);
  }
  return n * h;
}

EntropyValue entanglement_pure(const Vector& psi, const Dims& dims) {
  if (dims.size() != 2 || total_dim(dims) != psi.size()) throw DimensionError("vector does not match bipartite dims");
  const double n = psi.norm();
  if (std::abs(n - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "state vector norm " << n << " is not 1";
    throw ValidationError(Violation::NotUnitNorm, os.str());
  }
  return EntropyValue::finite(weighted_entanglement(psi, dims[0], dims[1]) / (n * n));
}

SchmidtDecomposition schmidt(const Vector& psi, int da, int db) {
  if (psi.size() != da * db) throw DimensionError("vector does not match dims");
  Matrix m(da, db);
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < db; ++b) m(a, b) = psi[a * db + b];
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SchmidtDecomposition out;
  out.coefficients = svd.singularValues();
  out.a_vectors = svd.matrixU();
  out.b_vectors = svd.matrixV().conjugate();
  return out;
}

double concurrence(const DensityMatrix& rho) {
  if (rho.dims() != Dims{2, 2}) throw DimensionError("concurrence needs a two-qubit state");
  Matrix sy(2, 2);
  sy << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  const Matrix yy = tensor(sy, sy);
  const Matrix tilde = yy * rho.matrix().conjugate() * yy;
  const Matrix root = psd_sqrt(rho.matrix());
  const Matrix r = root * tilde * root;
  Eigen::SelfAdjointEigenSolver<Matrix> es((r + r.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  RealVector l = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(l.data(), l.data() + l.size(), std::greater<>());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

EntropyValue eof_two_qubit(const DensityMatrix& rho) {
  const double c = std::min(1.0, concurrence(rho));
  const double x = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c)));
  return EntropyValue::finite(xlog2x_sum(x, 1.0 - x));
}

PureEnsemble eigen_ensemble(const DensityMatrix& rho) {
  require_bipartite(rho);
  return ensemble_from_columns(spectral_root(rho), rho.dims());
}

PureEnsemble random_feasible_ensemble(const DensityMatrix& rho, int ensemble_size, Rng& rng) {
  require_bipartite(rho);
  const Matrix w = spectral_root(rho);
  const int r = static_cast<int>(w.cols());
  if (ensemble_size < r) throw ValidationError(Violation::InvalidConfig, "ensemble size below rank");
  const Matrix u = haar_unitary(ensemble_size, rng).leftCols(r);
  return ensemble_from_columns(w * u.transpose(), rho.dims());
}

EofResult eof_numeric(const DensityMatrix& rho, const OptimizerConfig& cfg, int ensemble_size) {
  cfg.validate();
  require_bipartite(rho);
  if (rho.dim() > 16) throw DimensionError("eof_numeric is limited to total dimension 16");
  const int da = rho.dims()[0], db = rho.dims()[1];
  const Matrix w = spectral_root(rho);
  const int r = static_cast<int>(w.cols());
  EofResult out;
  if (r == 1) {
    out.argmin = ensemble_from_columns(w, rho.dims());
    out.value = entanglement_pure(out.argmin.states[0], rho.dims());
    out.converged = true;
    return out;
  }
  const int k = ensemble_size > 0 ? ensemble_size : rho.dim() * rho.dim();
  if (k < r) throw ValidationError(Violation::InvalidConfig, "ensemble size below rank");
  const int max_sweeps = std::max(5, cfg.max_iters / 20);

  struct Outcome {
    double value = 0.0;
    Matrix members;
    bool converged = false;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(cfg.restarts));
  parallel_for(outcomes.size(), [&](std::size_t rs) {
    Rng rng(derive_seed(cfg.seed, rs));
    Matrix u = Matrix::Zero(k, r);
    if (rs == 0) u.topRows(r).setIdentity();
    else u = haar_unitary(k, rng).leftCols(r);
    Matrix m = w * u.transpose();
    std::vector<double> g(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) g[i] = weighted_entanglement(m.col(i), da, db);
    double total = std::accumulate(g.begin(), g.end(), 0.0);

    NelderMeadOptions pair_opt;
    pair_opt.max_iters = 80;
    pair_opt.tol = cfg.tol * 0.1;
    pair_opt.initial_step = 0.5;
    pair_opt.stall_window = 15;
    pair_opt.max_rebuilds = 1;
    Vector a(rho.dim()), b(rho.dim());
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
      const double before = total;
      for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
          const double base = g[i] + g[j];
          if (base <= 0.0) continue;  // both members product or empty
          const auto ci = m.col(i);
          const auto cj = m.col(j);
          const Objective f = [&](const RealVector& x) {
            const double c = std::cos(x[0]), s = std::sin(x[0]);
            const Complex e = std::polar(1.0, x[1]);
            a = c * ci + (s * e) * cj;
            b = (-s * std::conj(e)) * ci + c * cj;
            return weighted_entanglement(a, da, db) + weighted_entanglement(b, da, db);
          };
          const NelderMeadResult res = nelder_mead(f, RealVector::Zero(2), pair_opt);
          if (res.fx < base - 1e-15) {
            f(res.x);
            m.col(i) = a;
            m.col(j) = b;
            g[i] = weighted_entanglement(a, da, db);
            g[j] = weighted_entanglement(b, da, db);
          }
        }
      }
      total = std::accumulate(g.begin(), g.end(), 0.0);
      converged = before - total < cfg.tol;
    }
    outcomes[rs].value = total;
    outcomes[rs].members = std::move(m);
    outcomes[rs].converged = converged;
  });
  std::vector<std::size_t> order(outcomes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return outcomes[x].value < outcomes[y].value; });
  const Outcome& best = outcomes[order[0]];
  out.argmin = ensemble_from_columns(best.members, rho.dims());
  out.value = EntropyValue::finite(out.argmin.average_entanglement());
  out.spread = order.size() > 1 ? outcomes[order[1]].value - best.value : 0.0;
  out.converged = best.converged && out.spread <= kSpreadTol;
  return out;
}

PureEnsemble compress_ensemble(const PureEnsemble& ensemble) {
  const Dims& dims = ensemble.dims;
  const int d = total_dim(dims);
  std::vector<double> p;
  std::vector<Vector> psi;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const double wi = ensemble.weights[static_cast<Eigen::Index>(i)];
    if (wi <= kWeightFloor) continue;
    bool merged = false;
    for (std::size_t j = 0; j < psi.size(); ++j) {
      if (std::abs(psi[j].dot(ensemble.states[i])) >= 1.0 - 1e-12) {
        p[j] += wi;
        merged = true;
        break;
      }
    }
    if (!merged) {
      p.push_back(wi);
      psi.push_back(ensemble.states[i]);
    }
  }
  const int rank = [&] {
    const RealVector ev = spectrum(ensemble.reconstruct());
    int n = 0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) n += ev[k] > kSupportEigenTol ? 1 : 0;
    return std::max(n, 1);
  }();
  std::vector<double> ent(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) ent[i] = weighted_entanglement(psi[i], dims[0], dims[1]);

  while (static_cast<int>(psi.size()) > rank * rank) {
    const int n = static_cast<int>(psi.size());
    Eigen::MatrixXd a(d * d, n);
    for (int i = 0; i < n; ++i) {
      const Matrix proj = psi[i] * psi[i].adjoint();
      int row = 0;
      for (int x = 0; x < d; ++x) {
        a(row++, i) = proj(x, x).real();
        for (int y = x + 1; y < d; ++y) {
          a(row++, i) = proj(x, y).real();
          a(row++, i) = proj(x, y).imag();
        }
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    Eigen::VectorXd c = svd.matrixV().col(n - 1);
    if ((a * c).cwiseAbs().maxCoeff() > 1e-9) break;  // no usable dependence
    double slope = 0.0;
    for (int i = 0; i < n; ++i) slope += c[i] * ent[i];
    if (slope > 0.0) c = -c;
    double t = std::numeric_limits<double>::infinity();
    int hit = -1;
    for (int i = 0; i < n; ++i) {
      if (c[i] < -1e-14 && p[i] / -c[i] < t) {
        t = p[i] / -c[i];
        hit = i;
      }
    }
    if (hit < 0) break;
    for (int i = 0; i < n; ++i) p[i] += t * c[i];
    p[hit] = 0.0;
    std::vector<double> p2, e2;
    std::vector<Vector> psi2;
    for (int i = 0; i < n; ++i) {
      if (p[i] <= kWeightFloor) continue;
      p2.push_back(p[i]);
      e2.push_back(ent[i]);
      psi2.push_back(psi[i]);
    }
    p = std::move(p2);
    ent = std::move(e2);
    psi = std::move(psi2);
  }
  RealVector weights = Eigen::Map<RealVector>(p.data(), static_cast<Eigen::Index>(p.size()));
  weights /= weights.sum();
  return PureEnsemble::make(dims, std::move(weights), std::move(psi));
}

SeparableEnsemble schmidt_dephased(const PureEnsemble& ensemble) {
  SeparableEnsemble out;
  out.dims = ensemble.dims;
  const int da = ensemble.dims[0], db = ensemble.dims[1];
  std::vector<double> q;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const SchmidtDecomposition s = schmidt(ensemble.states[i], da, db);
    for (Eigen::Index j = 0; j < s.coefficients.size(); ++j) {
      const double c2 = s.coefficients[j] * s.coefficients[j];
      if (c2 <= 1e-15) continue;
      q.push_back(ensemble.weights[static_cast<Eigen::Index>(i)] * c2);
      out.a_states.push_back(s.a_vectors.col(j));
      out.b_states.push_back(s.b_vectors.col(j));
    }
  }
  out.weights = Eigen::Map<RealVector>(q.data(), static_cast<Eigen::Index>(q.size()));
  out.weights /= out.weights.sum();
  return out;
}

namespace {

// Block-coordinate descent state for the separable search.
struct SeparableParams {
  RealVector logits;
  std::vector<Vector> a;
  std::vector<Vector> b;
};

SeparableParams params_from(const SeparableEnsemble& e) {
  SeparableParams p;
  p.logits.resize(static_cast<Eigen::Index>(e.size()));
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double q = e.weights[static_cast<Eigen::Index>(k)];
    p.logits[static_cast<Eigen::Index>(k)] = q > 0.0 ? std::max(-kLogitClamp, std::log(q)) : -kLogitClamp;
  }
  p.a = e.a_states;
  p.b = e.b_states;
  return p;
}

double clamped_exp(double x) { return std::exp(std::clamp(x, -kLogitClamp, kLogitClamp)); }

Matrix product_projector(const Vector& a, const Vector& b) {
  const Vector an = a / a.norm();
  const Vector bn = b / b.norm();
  Vector v(an.size() * bn.size());
  for (Eigen::Index i = 0; i < an.size(); ++i) v.segment(i * bn.size(), bn.size()) = an[i] * bn;
  return v * v.adjoint();
}

SeparableEnsemble ensemble_from(const SeparableParams& p, const Dims& dims) {
  SeparableEnsemble e;
  e.dims = dims;
  e.weights.resize(p.logits.size());
  for (Eigen::Index k = 0; k < p.logits.size(); ++k) e.weights[k] = clamped_exp(p.logits[k]);
  e.weights /= e.weights.sum();
  for (std::size_t k = 0; k < p.a.size(); ++k) {
    e.a_states.push_back(p.a[k] / p.a[k].norm());
    e.b_states.push_back(p.b[k] / p.b[k].norm());
  }
  return e;
}

class RegularizedObjective {
 public:
  RegularizedObjective(const Matrix& rho) : rho_(rho), d_(static_cast<int>(rho.rows())) {
    entropy_ = von_neumann_bits(rho);
  }
  // S(rho || (1 - eps) sigma + eps I / d) for a unit-trace sigma.
  double operator()(const Matrix& sigma) const {
    Matrix s = (1.0 - kEreEpsilon) * sigma;
    s.diagonal().array() += kEreEpsilon / d_;
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    double cross = 0.0;
    for (int l = 0; l < d_; ++l) {
      const auto u = es.eigenvectors().col(l);
      const double w = (u.adjoint() * rho_ * u)(0, 0).real();
      cross += w * std::log(std::max(es.eigenvalues()[l], 1e-300));
    }
    return -entropy_ - cross / kLn2;
  }

 private:
  const Matrix& rho_;
  int d_;
  double entropy_ = 0.0;
};

SeparableEnsemble marginal_dephased(const DensityMatrix& rho) {
  const Dims& dims = rho.dims();
  const Matrix ea = eig_hermitian(partial_trace(rho.matrix(), dims, {0})).eigenvectors;
  const Matrix eb = eig_hermitian(partial_trace(rho.matrix(), dims, {1})).eigenvectors;
  const BasisList bases{LocalBasis(nearest_unitary(ea)), LocalBasis(nearest_unitary(eb))};
  const RealVector diag = to_product_basis(rho.matrix(), dims, bases).diagonal().real();
  SeparableEnsemble out;
  out.dims = dims;
  std::vector<double> q;
  for (int i = 0; i < dims[0]; ++i) {
    for (int j = 0; j < dims[1]; ++j) {
      const double w = diag[i * dims[1] + j];
      if (w <= 1e-15) continue;
      q.push_back(w);
      out.a_states.push_back(bases[0].columns().col(i));
      out.b_states.push_back(bases[1].columns().col(j));
    }
  }
  out.weights = Eigen::Map<RealVector>(q.data(), static_cast<Eigen::Index>(q.size()));
  out.weights /= out.weights.sum();
  return out;
}

SeparableEnsemble random_separable(const Dims& dims, int k, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  SeparableEnsemble e;
  e.dims = dims;
  e.weights.resize(k);
  for (int m = 0; m < k; ++m) {
    e.weights[m] = std::exp(g(rng));
    Vector a(dims[0]), b(dims[1]);
    for (auto& z : a) z = Complex(g(rng), g(rng));
    for (auto& z : b) z = Complex(g(rng), g(rng));
    e.a_states.push_back(a / a.norm());
    e.b_states.push_back(b / b.norm());
  }
  e.weights /= e.weights.sum();
  return e;
}

}  // namespace

EreResult ere_numeric(const DensityMatrix& rho, const OptimizerConfig& cfg, int ensemble_size,
                      const std::vector<SeparableEnsemble>& warm_starts) {
  cfg.validate();
  require_bipartite(rho);
  if (rho.dim() > 16) throw DimensionError("ere_numeric is limited to total dimension 16");
  const Dims& dims = rho.dims();
  const int da = dims[0], db = dims[1];
  const int k_default = ensemble_size > 0 ? ensemble_size : rho.dim() * rho.dim();
  for (const auto& w : warm_starts) {
    if (w.dims != dims) throw DimensionError("warm start dims differ from the state");
  }

  std::vector<SeparableEnsemble> seeds;
  seeds.push_back(marginal_dephased(rho));
  seeds.push_back(schmidt_dephased(eigen_ensemble(rho)));
  seeds.insert(seeds.end(), warm_starts.begin(), warm_starts.end());

  const RegularizedObjective objective(rho.matrix());
  const int max_sweeps = std::max(5, cfg.max_iters / 20);
  const int block_params = 1 + 2 * da + 2 * db;

  struct Outcome {
    double value = 0.0;
    SeparableEnsemble ensemble;
    bool converged = false;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(cfg.restarts));
  parallel_for(outcomes.size(), [&](std::size_t rs) {
    Rng rng(derive_seed(cfg.seed, rs));
    SeparableParams p = params_from(rs < seeds.size() ? seeds[rs] : random_separable(dims, k_default, rng));
    const int k = static_cast<int>(p.a.size());
    std::vector<Matrix> proj(static_cast<std::size_t>(k));
    for (int m = 0; m < k; ++m) proj[m] = product_projector(p.a[m], p.b[m]);
    auto full_sigma = [&] {
      Matrix s = Matrix::Zero(rho.dim(), rho.dim());
      double z = 0.0;
      for (int m = 0; m < k; ++m) {
        const double w = clamped_exp(p.logits[m]);
        s += w * proj[m];
        z += w;
      }
      return Matrix(s / z);
    };
    double current = objective(full_sigma());

    NelderMeadOptions opt;
    opt.max_iters = 150;
    opt.tol = cfg.tol * 0.1;
    opt.initial_step = 0.3;
    opt.stall_window = 25;
    opt.max_rebuilds = 1;
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps && !converged && k > 0; ++sweep) {
      const double before = current;
      for (int m = 0; m < k; ++m) {
        Matrix rest = Matrix::Zero(rho.dim(), rho.dim());
        double zrest = 0.0;
        for (int o = 0; o < k; ++o) {
          if (o == m) continue;
          const double w = clamped_exp(p.logits[o]);
          rest += w * proj[o];
          zrest += w;
        }
        RealVector x0(block_params);
        x0[0] = p.logits[m];
        for (int i = 0; i < da; ++i) {
          x0[1 + i] = p.a[m][i].real();
          x0[1 + da + i] = p.a[m][i].imag();
        }
        for (int j = 0; j < db; ++j) {
          x0[1 + 2 * da + j] = p.b[m][j].real();
          x0[1 + 2 * da + db + j] = p.b[m][j].imag();
        }
        auto unpack = [&](const RealVector& x, Vector& a, Vector& b) {
          a.resize(da);
          b.resize(db);
          for (int i = 0; i < da; ++i) a[i] = Complex(x[1 + i], x[1 + da + i]);
          for (int j = 0; j < db; ++j) b[j] = Complex(x[1 + 2 * da + j], x[1 + 2 * da + db + j]);
        };
        Vector a, b;
        const Objective f = [&](const RealVector& x) {
          unpack(x, a, b);
          if (a.norm() < 1e-12 || b.norm() < 1e-12) return std::numeric_limits<double>::infinity();
          const double w = clamped_exp(x[0]);
          return objective((rest + w * product_projector(a, b)) / (zrest + w));
        };
        const NelderMeadResult res = nelder_mead(f, x0, opt);
        if (res.fx < current) {
          unpack(res.x, a, b);
          p.logits[m] = std::clamp(res.x[0], -kLogitClamp, kLogitClamp);
          p.a[m] = a / a.norm();
          p.b[m] = b / b.norm();
          proj[m] = product_projector(p.a[m], p.b[m]);
          current = res.fx;
        }
      }
      converged = before - current < cfg.tol;
    }
    outcomes[rs].value = current;
    outcomes[rs].ensemble = ensemble_from(p, dims);
    outcomes[rs].converged = converged;
  });

  // Compare restarts on the unregularized value where it is finite.
  std::vector<double> finals(outcomes.size());
  std::vector<double> regs(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const Matrix sigma = outcomes[i].ensemble.assemble();
    const double exact = relative_entropy_bits(rho.matrix(), sigma);
    regs[i] = objective(sigma);
    finals[i] = std::isfinite(exact) ? exact : regs[i];
  }
  std::vector<std::size_t> order(outcomes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return finals[x] < finals[y]; });
  const std::size_t best = order[0];
  EreResult out;
  const double v = finals[best];
  out.value = EntropyValue::finite(v < 0.0 && v > -1e-10 ? 0.0 : v);
  out.argmin = outcomes[best].ensemble;
  out.spread = order.size() > 1 ? finals[order[1]] - finals[best] : 0.0;
  out.converged = outcomes[best].converged && out.spread <= kSpreadTol;
  const double exact = relative_entropy_bits(rho.matrix(), out.argmin.assemble());
  out.regularization_gap = std::isfinite(exact) ? std::abs(regs[best] - exact) : std::numeric_limits<double>::infinity();
  return out;
}

DensityMatrix max_corr_state(const DensityMatrix& rho_star) {
  if (rho_star.parties() != 1) throw DimensionError("rho* must be a single-system state");
  const int d = rho_star.dim();
  Matrix m = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i * d + i, j * d + j) = rho_star.matrix()(i, j);
  return DensityMatrix::assume_valid(std::move(m), {d, d});
}

EntropyValue ere_max_corr(const DensityMatrix& rho) {
  if (rho.parties() != 2 || rho.dims()[0] != rho.dims()[1]) {
    throw ValidationError(Violation::NotMaximallyCorrelated, "maximally correlated states need equal local dimensions");
  }
  const int d = rho.dims()[0];
  const Matrix& m = rho.matrix();
  Matrix star(d, d);
  for (int r = 0; r < d * d; ++r) {
    for (int c = 0; c < d * d; ++c) {
      const bool on_pattern = r % (d + 1) == 0 && c % (d + 1) == 0;
      if (on_pattern) star(r / (d + 1), c / (d + 1)) = m(r, c);
      else if (std::abs(m(r, c)) > 1e-10) {
        throw ValidationError(Violation::NotMaximallyCorrelated, "state has entries outside the |ii><jj| pattern");
      }
    }
  }
  const double c = shannon_bits(star.diagonal().real()) - von_neumann_bits(star);
  return EntropyValue::finite(c < 0.0 && c > -1e-10 ? 0.0 : c);
}

}  // namespace coherekit
