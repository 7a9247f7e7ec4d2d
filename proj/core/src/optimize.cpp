#include "coherekit/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coherekit {

void OptimizerConfig::validate() const {
  if (restarts < 1) throw ValidationError(Violation::InvalidConfig, "restarts must be >= 1");
  if (max_iters < 1) throw ValidationError(Violation::InvalidConfig, "max_iters must be >= 1");
  if (!(tol > 0.0)) throw ValidationError(Violation::InvalidConfig, "tol must be > 0");
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept {
  std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

double safe_eval(const Objective& f, const RealVector& x) {
  const double v = f(x);
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, const RealVector& x0, const NelderMeadOptions& opt) {
  const int n = static_cast<int>(x0.size());
  NelderMeadResult res;
  res.x = x0;
  res.fx = safe_eval(f, x0);
  if (n == 0) {
    res.converged = true;
    return res;
  }
  const double nd = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / nd;
  const double gamma = 0.75 - 0.5 / nd;
  const double delta = 1.0 - 1.0 / nd;

  std::vector<RealVector> simplex(n + 1);
  std::vector<double> fv(n + 1);
  std::vector<int> order(n + 1);

  auto build = [&](const RealVector& centre, double fc, double step) {
    simplex[0] = centre;
    fv[0] = fc;
    for (int k = 0; k < n; ++k) {
      simplex[k + 1] = centre;
      simplex[k + 1][k] += step;
      fv[k + 1] = safe_eval(f, simplex[k + 1]);
    }
  };

  double step = opt.initial_step;
  build(x0, res.fx, step);
  int iters = 0;
  int rebuilds = 0;
  double window_best = res.fx;
  int window_start = 0;
  double best_at_rebuild = res.fx;

  RealVector centroid(n), xr(n), xe(n), xc(n);
  while (iters < opt.max_iters) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int ib = order[0], iw = order[n], is = order[n - 1];
    if (fv[ib] < res.fx) {
      res.fx = fv[ib];
      res.x = simplex[ib];
    }

    if (iters - window_start >= opt.stall_window) {
      if (window_best - res.fx < opt.tol) {
        // Stalled. A rebuild that also failed to improve means we are done.
        if (rebuilds >= opt.max_rebuilds || (rebuilds > 0 && best_at_rebuild - res.fx < opt.tol)) {
          res.converged = true;
          break;
        }
        best_at_rebuild = res.fx;
        ++rebuilds;
        step = std::max(step * 0.5, 1e-4);
        build(res.x, res.fx, step);
        window_start = iters;
        window_best = res.fx;
        continue;
      }
      window_start = iters;
      window_best = res.fx;
    }
    ++iters;

    centroid.setZero();
    for (int k = 0; k <= n; ++k)
      if (k != iw) centroid += simplex[k];
    centroid /= nd;

    xr = centroid + alpha * (centroid - simplex[iw]);
    const double fr = safe_eval(f, xr);
    if (fr < fv[ib]) {
      xe = centroid + beta * (xr - centroid);
      const double fe = safe_eval(f, xe);
      if (fe < fr) {
        simplex[iw] = xe;
        fv[iw] = fe;
      } else {
        simplex[iw] = xr;
        fv[iw] = fr;
      }
      continue;
    }
    if (fr < fv[is]) {
      simplex[iw] = xr;
      fv[iw] = fr;
      continue;
    }
    bool accepted = false;
    if (fr < fv[iw]) {
      xc = centroid + gamma * (xr - centroid);
      const double fc = safe_eval(f, xc);
      if (fc <= fr) {
        simplex[iw] = xc;
        fv[iw] = fc;
        accepted = true;
      }
    } else {
      xc = centroid - gamma * (centroid - simplex[iw]);
      const double fc = safe_eval(f, xc);
      if (fc < fv[iw]) {
        simplex[iw] = xc;
        fv[iw] = fc;
        accepted = true;
      }
    }
    if (!accepted) {
      for (int k = 0; k <= n; ++k) {
        if (k == ib) continue;
        simplex[k] = simplex[ib] + delta * (simplex[k] - simplex[ib]);
        fv[k] = safe_eval(f, simplex[k]);
      }
    }
  }
  for (int k = 0; k <= n; ++k) {
    if (fv[k] < res.fx) {
      res.fx = fv[k];
      res.x = simplex[k];
    }
  }
  res.iterations = iters;
  return res;
}

Matrix hermitian_from_params(const double* x, int d) {
  Matrix h = Matrix::Zero(d, d);
  int p = 0;
  for (int i = 0; i < d; ++i) h(i, i) = x[p++];
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const Complex z(x[p], x[p + 1]);
      p += 2;
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  return h;
}

Matrix unitary_from_params(const Matrix& base, const double* x, int d) {
  const Matrix h = hermitian_from_params(x, d);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(d);
  for (int k = 0; k < d; ++k) phases[k] = std::polar(1.0, es.eigenvalues()[k]);
  return base * (es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
}

Matrix nearest_unitary(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace coherekit
