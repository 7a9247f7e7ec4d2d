#include "coherekit/discord.hpp"

#include "coherekit/parallel.hpp"
#include "coherekit/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace coherekit {

namespace {

constexpr double kSpreadTol = 1e-5;

void require_bipartite(const DensityMatrix& rho) {
  if (rho.parties() != 2) throw DimensionError("bipartite state required");
}

EntropyValue clamp_discord(double bits) {
  if (std::isinf(bits)) throw InternalError("discord evaluated to infinity");
  return clamp_correlated(bits);
}

// One restart of a search over local unitaries on the listed parties.
struct SearchProblem {
  Dims dims;
  std::vector<int> parties;  // subsystems whose basis is optimized
  std::function<double(const BasisList&)> measure;
};

int param_count(const SearchProblem& p) {
  int n = 0;
  for (int k : p.parties) n += unitary_param_count(p.dims[k]);
  return n;
}

BasisList bases_from(const SearchProblem& p, const std::vector<Matrix>& starts, const RealVector& x) {
  BasisList out = computational_bases(p.dims);
  int off = 0;
  for (std::size_t s = 0; s < p.parties.size(); ++s) {
    const int k = p.parties[s];
    const int d = p.dims[k];
    out[k] = LocalBasis(nearest_unitary(unitary_from_params(starts[s], x.data() + off, d)));
    off += unitary_param_count(d);
  }
  return out;
}

struct RestartOutcome {
  double value = 0.0;
  BasisList bases;
};

// Restart 0 starts from computational bases, restart 1 from the marginal
// eigenbases, the rest from Haar-random bases.
BasisSearchResult run_search(const DensityMatrix& rho, const SearchProblem& prob, const OptimizerConfig& cfg,
                             const std::function<EntropyValue(const BasisList&)>& final_eval) {
  cfg.validate();
  std::vector<Matrix> eigen_starts;
  for (int k : prob.parties) {
    const Matrix m = partial_trace(rho.matrix(), rho.dims(), {k});
    eigen_starts.push_back(eig_hermitian(m).eigenvectors);
  }
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));
  const int nparams = param_count(prob);
  parallel_for(outcomes.size(), [&](std::size_t r) {
    Rng rng(derive_seed(cfg.seed, r));
    std::vector<Matrix> starts;
    for (std::size_t s = 0; s < prob.parties.size(); ++s) {
      const int d = prob.dims[prob.parties[s]];
      if (r == 0) starts.push_back(Matrix::Identity(d, d));
      else if (r == 1) starts.push_back(eigen_starts[s]);
      else starts.push_back(haar_unitary(d, rng));
    }
    const Objective f = [&](const RealVector& x) { return prob.measure(bases_from(prob, starts, x)); };
    NelderMeadOptions opt;
    opt.max_iters = cfg.max_iters;
    opt.tol = cfg.tol;
    opt.initial_step = 0.4;
    const NelderMeadResult res = nelder_mead(f, RealVector::Zero(nparams), opt);
    outcomes[r].value = res.fx;
    outcomes[r].bases = bases_from(prob, starts, res.x);
  });
  std::vector<std::size_t> order(outcomes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return outcomes[a].value < outcomes[b].value; });
  BasisSearchResult out;
  out.argmin_bases = outcomes[order[0]].bases;
  out.spread = order.size() > 1 ? outcomes[order[1]].value - outcomes[order[0]].value : 0.0;
  out.converged = out.spread <= kSpreadTol;
  out.value = final_eval(out.argmin_bases);
  return out;
}

}  // namespace

DensityMatrix measure_local(const DensityMatrix& rho, int target, const LocalBasis& basis) {
  if (target < 0 || target >= rho.parties()) throw DimensionError("measured subsystem out of range");
  if (basis.dim() != rho.dims()[target]) throw DimensionError("basis does not match measured subsystem");
  BasisList bases = computational_bases(rho.dims());
  bases[target] = basis;
  return DensityMatrix::assume_valid(dephase_parties(rho.matrix(), rho.dims(), bases, {target}), rho.dims());
}

EntropyValue discord_asym_basis(const BipartiteFrame& frame, int measured) {
  if (measured != 0 && measured != 1) throw DimensionError("measured side must be 0 (A) or 1 (B)");
  const DensityMatrix& rho = frame.state();
  const Matrix ra = partial_trace(rho.matrix(), rho.dims(), {0});
  const Matrix rb = partial_trace(rho.matrix(), rho.dims(), {1});
  const Matrix prod = tensor(ra, rb);
  const Matrix rho_m = dephase_parties(rho.matrix(), rho.dims(), frame.bases(), {measured});
  const Matrix prod_m = dephase_parties(prod, rho.dims(), frame.bases(), {measured});
  const double before = relative_entropy_bits(rho.matrix(), prod);
  const double after = relative_entropy_bits(rho_m, prod_m);
  return clamp_discord(before - after);
}

EntropyValue discord_sym_basis(const BipartiteFrame& frame) {
  const DensityMatrix& rho = frame.state();
  const Matrix ra = partial_trace(rho.matrix(), rho.dims(), {0});
  const Matrix rb = partial_trace(rho.matrix(), rho.dims(), {1});
  const Matrix pa = dephase_parties(ra, {rho.dims()[0]}, {frame.basis_a()}, {0});
  const Matrix pb = dephase_parties(rb, {rho.dims()[1]}, {frame.basis_b()}, {0});
  const Matrix pr = dephase_parties(rho.matrix(), rho.dims(), frame.bases(), {0, 1});
  const double before = relative_entropy_bits(rho.matrix(), tensor(ra, rb));
  const double after = relative_entropy_bits(pr, tensor(pa, pb));
  return clamp_discord(before - after);
}

AsymmetricDiscordEvaluator::AsymmetricDiscordEvaluator(const DensityMatrix& rho, int measured)
    : dims_(rho.dims()),
      measured_(measured),
      global_(rho.matrix(), rho.dims()),
      local_(partial_trace(rho.matrix(), rho.dims(), {measured}), Dims{rho.dims().at(measured)}) {
  require_bipartite(rho);
  if (measured != 0 && measured != 1) throw DimensionError("measured side must be 0 (A) or 1 (B)");
}

double AsymmetricDiscordEvaluator::operator()(const LocalBasis& basis) const {
  BasisList bases = computational_bases(dims_);
  bases[measured_] = basis;
  return global_.partial(bases, {measured_}) - local_(BasisList{basis});
}

BasisSearchResult discord_sym_min(const DensityMatrix& rho, const OptimizerConfig& cfg) {
  require_bipartite(rho);
  if (rho.dim() > 36) throw DimensionError("discord_sym_min is limited to total dimension 36");
  const CorrelatedCoherenceEvaluator ev(rho);
  SearchProblem prob{rho.dims(), {0, 1}, [&](const BasisList& b) { return ev(b); }};
  return run_search(rho, prob, cfg, [&](const BasisList& b) {
    return discord_sym_basis(BipartiteFrame(rho, b[0], b[1]));
  });
}

BasisSearchResult discord_asym_min(const DensityMatrix& rho, const OptimizerConfig& cfg, int measured) {
  require_bipartite(rho);
  if (rho.dim() > 36) throw DimensionError("discord_asym_min is limited to total dimension 36");
  const AsymmetricDiscordEvaluator ev(rho, measured);
  SearchProblem prob{rho.dims(), {measured}, [&](const BasisList& b) { return ev(b[measured]); }};
  return run_search(rho, prob, cfg, [&](const BasisList& b) {
    return discord_asym_basis(BipartiteFrame(rho, b[0], b[1]), measured);
  });
}

EntropyValue gqd_basis(const DensityMatrix& rho, const BasisList& bases) {
  if (rho.parties() < 2) throw DimensionError("GQD needs at least two parties");
  if (bases.size() != rho.dims().size()) throw DimensionError("one basis per subsystem is required");
  const CorrelatedCoherenceEvaluator ev(rho);
  return clamp_correlated(ev(bases));
}

BasisSearchResult gqd_min(const DensityMatrix& rho, const OptimizerConfig& cfg) {
  if (rho.parties() < 2) throw DimensionError("GQD needs at least two parties");
  if (rho.dim() > 27) throw DimensionError("gqd_min is limited to total dimension 27");
  const CorrelatedCoherenceEvaluator ev(rho);
  std::vector<int> all(rho.dims().size());
  std::iota(all.begin(), all.end(), 0);
  SearchProblem prob{rho.dims(), all, [&](const BasisList& b) { return ev(b); }};
  return run_search(rho, prob, cfg, [&](const BasisList& b) { return gqd_basis(rho, b); });
}

}  // namespace coherekit
