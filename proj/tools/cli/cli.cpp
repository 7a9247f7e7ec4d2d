#include "cli.hpp"

#include "report.hpp"
#include "suites.hpp"

#include <coherekit/coherence.hpp>
#include <coherekit/discord.hpp>
#include <coherekit/entanglement.hpp>
#include <coherekit/eoc.hpp>
#include <coherekit/state_io.hpp>
#include <coherekit/states.hpp>
#include <coherekit/structure.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <ostream>

namespace coherekit::cli {

namespace {

// Bad command-line values that CLI11 cannot see (exit 2).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

const std::vector<std::string> kMeasures = {
    "coherence", "correlated-coherence", "discord-asym", "discord-sym", "discord-min",
    "discord-asym-min", "gqd", "gqd-min", "eof", "ere", "eoc-bounds"};

const std::vector<std::string> kFamilies = {"bell", "ghz", "max-corr", "paper-qutrit-example",
                                            "random-mixed", "random-pure", "cc-random"};

struct CommonFlags {
  std::string format = "json";
  bool timing = false;
  std::uint64_t seed = 0;
  int restarts = 32;
  int max_iters = 2000;
  double tol = 1e-8;

  OptimizerConfig cfg() const {
    OptimizerConfig c;
    c.restarts = restarts;
    c.max_iters = max_iters;
    c.tol = tol;
    c.seed = seed;
    try {
      c.validate();
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

struct MeasureArgs {
  std::string state;
  std::vector<std::string> bases;
  std::string measure;
  int measured = 1;
};

struct VerifyArgs {
  std::string suite;
  int n = 100;
  std::optional<double> tol;
};

struct GenArgs {
  std::string family;
  std::vector<int> dims;
  int parties = 3;
  int rank = 0;
  std::string rho_star;
  std::string out;
};

Json matrix_json(const Matrix& m) {
  return Json::parse(matrix_to_json(m, {static_cast<int>(m.rows())}))["matrix"];
}

Json bases_json(const BasisList& b) {
  Json arr = Json::array();
  for (const auto& x : b) arr.push_back(matrix_json(x.columns()));
  return arr;
}

MeasureValue entropy_value(const std::string& name, const EntropyValue& v) {
  MeasureValue m;
  m.name = name;
  m.value = v;
  return m;
}

MeasureValue search_value(const std::string& name, const BasisSearchResult& r) {
  MeasureValue m = entropy_value(name, r.value);
  m.converged = r.converged;
  m.spread = r.spread;
  m.flags["argmin_bases"] = bases_json(r.argmin_bases);
  return m;
}

BipartiteFrame frame_of(const DensityMatrix& rho, const BasisList& b) {
  if (rho.parties() != 2) throw DimensionError("this measure needs a bipartite state");
  return BipartiteFrame(rho, b[0], b[1]);
}

void do_measure(const MeasureArgs& a, const CommonFlags& c, Report& rep) {
  const OptimizerConfig cfg = c.cfg();
  const DensityMatrix rho = read_state_file(a.state);
  BasisList bases;
  for (const auto& p : a.bases) bases.push_back(read_basis_file(p));
  if (bases.empty()) bases = computational_bases(rho.dims());
  if (bases.size() != rho.dims().size()) throw DimensionError("one --basis per subsystem is required");

  rep.inputs["state"] = a.state;
  rep.inputs["dims"] = rho.dims();
  rep.inputs["bases"] = a.bases;
  rep.inputs["measure"] = a.measure;
  rep.inputs["restarts"] = cfg.restarts;
  rep.inputs["max_iters"] = cfg.max_iters;
  rep.inputs["tol"] = cfg.tol;

  const std::string& m = a.measure;
  if (m == "coherence") {
    rep.values.push_back(entropy_value("coherence", coherence_re(rho, bases)));
  } else if (m == "correlated-coherence") {
    const BipartiteFrame f = frame_of(rho, bases);
    MeasureValue v = entropy_value("correlated_coherence", correlated_coherence(f));
    v.flags["total"] = entropy_json(coherence_re(rho, bases));
    v.flags["local_a"] = entropy_json(coherence_re(partial_trace(rho, {0}), {bases[0]}));
    v.flags["local_b"] = entropy_json(coherence_re(partial_trace(rho, {1}), {bases[1]}));
    rep.values.push_back(std::move(v));
  } else if (m == "discord-asym") {
    if (a.measured != 0 && a.measured != 1) throw UsageError("--measured must be 0 or 1");
    MeasureValue v = entropy_value("discord_asym", discord_asym_basis(frame_of(rho, bases), a.measured));
    v.flags["measured"] = a.measured;
    rep.values.push_back(std::move(v));
  } else if (m == "discord-sym") {
    rep.values.push_back(entropy_value("discord_sym", discord_sym_basis(frame_of(rho, bases))));
  } else if (m == "discord-min") {
    rep.values.push_back(search_value("discord_sym_min", discord_sym_min(rho, cfg)));
  } else if (m == "discord-asym-min") {
    if (a.measured != 0 && a.measured != 1) throw UsageError("--measured must be 0 or 1");
    MeasureValue v = search_value("discord_asym_min", discord_asym_min(rho, cfg, a.measured));
    v.flags["measured"] = a.measured;
    rep.values.push_back(std::move(v));
  } else if (m == "gqd") {
    rep.values.push_back(entropy_value("gqd", gqd_basis(rho, bases)));
  } else if (m == "gqd-min") {
    rep.values.push_back(search_value("gqd_min", gqd_min(rho, cfg)));
  } else if (m == "eof") {
    if (rho.dims() == Dims{2, 2}) {
      MeasureValue v = entropy_value("eof", eof_two_qubit(rho));
      v.flags["method"] = "closed-form";
      v.flags["concurrence"] = concurrence(rho);
      rep.values.push_back(std::move(v));
    }
    const EofResult r = eof_numeric(rho, cfg);
    MeasureValue v = entropy_value("eof_numeric", r.value);
    v.converged = r.converged;
    v.spread = r.spread;
    v.flags["ensemble_size"] = r.argmin.size();
    rep.values.push_back(std::move(v));
  } else if (m == "ere") {
    const EreResult r = ere_numeric(rho, cfg);
    MeasureValue v = entropy_value("ere", r.value);
    v.converged = r.converged;
    v.spread = r.spread;
    v.flags["regularization_gap"] =
        std::isfinite(r.regularization_gap) ? Json(r.regularization_gap) : Json(number_text(r.regularization_gap));
    rep.values.push_back(std::move(v));
    try {
      rep.values.push_back(entropy_value("ere_max_corr", ere_max_corr(rho)));
    } catch (const ValidationError&) {
      // not maximally correlated; the closed form does not apply
    }
  } else if (m == "eoc-bounds") {
    const BoundsReport r = eoc_upper_bound(rho, cfg);
    MeasureValue lo = entropy_value("e_re_lower", r.e_re_lower);
    lo.converged = r.ere_converged;
    lo.spread = r.ere_spread;
    MeasureValue up = entropy_value("eoc_upper", r.eoc_upper);
    up.flags["best_candidate"] = r.best_candidate;
    up.flags["candidates_evaluated"] = r.candidates_evaluated;
    up.flags["candidates_skipped"] = r.candidates_skipped;
    up.flags["trivial_symmetric"] = r.trivial_symmetric;
    up.flags["degenerate"] = r.degenerate;
    up.flags["degenerate_spread"] = r.degenerate_spread;
    MeasureValue ef = entropy_value("e_f", r.e_f);
    ef.converged = r.eof_converged;
    ef.spread = r.eof_spread;
    ef.flags["method"] = rho.dims() == Dims{2, 2} ? "closed-form" : "numeric";
    MeasureValue ord;
    ord.name = "ordering";
    ord.flags["ok"] = r.ordering_ok;
    ord.flags["tolerance"] = EocOptions{}.ordering_tol;
    rep.values.push_back(std::move(lo));
    rep.values.push_back(std::move(up));
    rep.values.push_back(std::move(ef));
    rep.values.push_back(std::move(ord));
  }
}

void do_verify(const VerifyArgs& a, const CommonFlags& c, Report& rep) {
  SuiteOptions o;
  o.n = a.n;
  o.seed = c.seed;
  o.tol = a.tol;
  o.cfg = c.cfg();
  if (o.n < 1) throw UsageError("--n must be positive");
  if (a.tol && !(*a.tol > 0.0)) throw UsageError("--tol must be positive");
  rep.inputs["suite"] = a.suite;
  rep.inputs["n"] = a.n;
  if (a.tol) rep.inputs["tol"] = *a.tol;
  rep.inputs["restarts"] = o.cfg.restarts;
  rep.inputs["max_iters"] = o.cfg.max_iters;
  run_suite(a.suite, o, rep);
}

Dims gen_dims(const GenArgs& a, const Dims& fallback, bool bipartite) {
  Dims d = a.dims.empty() ? fallback : Dims(a.dims.begin(), a.dims.end());
  if (bipartite && d.size() != 2) throw UsageError("--dims must name two subsystems for this family");
  int total = 1;
  for (int x : d) {
    if (x < 1 || x > 64) throw UsageError("subsystem dimensions must be in 1..64");
    total *= x;
    if (total > 64) throw UsageError("total dimension is limited to 64");
  }
  return d;
}

std::string do_gen(const GenArgs& a, const CommonFlags& c) {
  Rng rng(c.seed);
  const std::string& f = a.family;
  DensityMatrix rho = maximally_mixed({1});
  if (f == "bell") {
    rho = bell_state();
  } else if (f == "ghz") {
    if (a.parties < 2 || a.parties > 6) throw UsageError("--parties must be in 2..6");
    rho = ghz_state(a.parties);
  } else if (f == "max-corr") {
    if (a.rho_star.empty()) throw UsageError("max-corr needs --rho-star");
    rho = max_corr_state(read_state_file(a.rho_star));
  } else if (f == "paper-qutrit-example") {
    rho = paper_qutrit_example();
  } else if (f == "random-mixed") {
    const Dims d = gen_dims(a, {2, 2}, false);
    if (a.rank < 0) throw UsageError("--rank must be non-negative");
    rho = random_mixed_state(d, rng, a.rank);
  } else if (f == "random-pure") {
    rho = random_pure_state(gen_dims(a, {2, 2}, false), rng);
  } else if (f == "cc-random") {
    const Dims d = gen_dims(a, {2, 2}, true);
    rho = random_cc_state(d[0], d[1], rng).state;
  }
  return state_to_json(rho);
}

void add_common(CLI::App* sub, CommonFlags& c, bool optimizer) {
  sub->add_option("--seed", c.seed, "Root seed for every stochastic component")->capture_default_str();
  if (optimizer) {
    sub->add_option("--restarts", c.restarts, "Optimizer restarts")->capture_default_str();
    sub->add_option("--max-iters", c.max_iters, "Optimizer iteration budget")->capture_default_str();
    sub->add_option("--tol", c.tol, "Optimizer tolerance")->capture_default_str();
  }
  sub->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  sub->add_flag("--timing", c.timing, "Include wall_time in the report");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coherence, discord and entanglement measures on small density matrices"};
  app.name("coherekit");
  app.require_subcommand(1);

  CommonFlags mc, vc, gc;
  vc.restarts = 4;

  MeasureArgs ma;
  auto* measure = app.add_subcommand("measure", "Compute one measure of a state file");
  measure->add_option("--state", ma.state, "State file (JSON)")->required();
  measure->add_option("--basis", ma.bases, "Basis file per subsystem, in order (default: computational)");
  measure->add_option("--measure", ma.measure, "Measure name")->required()->check(CLI::IsMember(kMeasures));
  measure->add_option("--measured", ma.measured, "Measured party for discord-asym / discord-asym-min")
      ->capture_default_str();
  add_common(measure, mc, true);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run an invariant suite on seeded random states");
  verify->add_option("--suite", va.suite, "Suite name")->required()->check(CLI::IsMember(suite_names()));
  verify->add_option("--n", va.n, "Number of items")->capture_default_str();
  add_common(verify, vc, false);
  verify->add_option("--tol", va.tol, "Override the tolerance of every check");
  verify->add_option("--restarts", vc.restarts, "Optimizer restarts per item")->capture_default_str();
  verify->add_option("--max-iters", vc.max_iters, "Optimizer iteration budget")->capture_default_str();

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Write a state file");
  gen->add_option("--family", ga.family, "State family")->required()->check(CLI::IsMember(kFamilies));
  gen->add_option("--dims", ga.dims, "Subsystem dimensions, e.g. 2,3")->delimiter(',');
  gen->add_option("--parties", ga.parties, "Number of parties for ghz")->capture_default_str();
  gen->add_option("--rank", ga.rank, "Rank for random-mixed (0: full)")->capture_default_str();
  gen->add_option("--rho-star", ga.rho_star, "Single-system state file for max-corr");
  gen->add_option("--out", ga.out, "Output path (default: stdout)");
  gen->add_option("--seed", gc.seed, "Seed for random families")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }

  try {
    if (gen->parsed()) {
      const std::string text = do_gen(ga, gc);
      if (ga.out.empty()) {
        out << text;
      } else {
        std::ofstream f(ga.out, std::ios::binary);
        if (!f) throw UsageError("cannot write " + ga.out);
        f << text;
        if (!f.flush()) throw UsageError("cannot write " + ga.out);
      }
      return kExitOk;
    }

    const bool is_measure = measure->parsed();
    const CommonFlags& c = is_measure ? mc : vc;
    Report rep;
    rep.command = is_measure ? "measure" : "verify";
    rep.seed = c.seed;
    const auto start = std::chrono::steady_clock::now();
    if (is_measure) {
      do_measure(ma, c, rep);
    } else {
      do_verify(va, c, rep);
    }
    if (c.timing) rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << rep.render(c.format);
    return rep.passed() ? kExitOk : kExitFailure;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace coherekit::cli
