#include "thermoshield/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "thermoshield/annulus_solver.hpp"
#include "thermoshield/errors.hpp"
#include "thermoshield/geometry.hpp"
#include "thermoshield/io.hpp"
#include "thermoshield/numerics.hpp"
#include "thermoshield/shape_optimizer.hpp"
#include "thermoshield/verification.hpp"

namespace thermoshield {

namespace {

using io::json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNonConvergence = 3;

Mesh parse_mesh(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("--mesh expects n_s,n_theta");
  Mesh m;
  try {
    std::size_t used = 0;
    m.n_s = std::stoi(text.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("");
    const std::string rest = text.substr(comma + 1);
    m.n_theta = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("--mesh expects two integers n_s,n_theta");
  }
  m.validate();
  return m;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot open output file '" + path + "'");
  return f;
}

int sweep_threads(int count) {
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("THERMOSHIELD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw std::invalid_argument("THERMOSHIELD_THREADS must be a positive integer");
    threads = static_cast<int>(std::min<long>(v, 1024));
  }
  return std::min(threads, count);
}

std::vector<double> sweep_grid(const io::SweepSpec& s) {
  if (!s.log_scale) return numerics::linspace(s.lo, s.hi, s.count);
  std::vector<double> g = numerics::linspace(std::log(s.lo), std::log(s.hi), s.count);
  for (double& v : g) v = std::exp(v);
  g.front() = s.lo;
  g.back() = s.hi;
  return g;
}

EnergyBreakdown sweep_point(const io::SweepSpec& s, double v) {
  switch (s.axis) {
    case io::SweepAxis::beta:
      return radial::general_radial_energy(s.n, DissipationLaw::convection(v), s.R, s.lambda);
    case io::SweepAxis::gamma:
      return radial::general_radial_energy(s.n, DissipationLaw::radiation(v), s.R, s.lambda);
    case io::SweepAxis::R:
      return radial::general_radial_energy(s.n, s.law, v, s.lambda);
    case io::SweepAxis::lambda:
      return radial::general_radial_energy(s.n, s.law, s.R, v);
    case io::SweepAxis::M: {
      const double omega = unit_ball_volume(s.n);
      if (v < omega) throw std::invalid_argument("sweep: M must be at least the unit-ball volume");
      return radial::best_radius(s.n, s.law, std::pow(v / omega, 1.0 / s.n), s.lambda).energy;
    }
  }
  throw std::logic_error("sweep: unhandled axis");
}

/// Evaluates every grid point on a worker pool; rows land at their index, and
/// the lowest-index failure is rethrown so errors are deterministic too.
std::vector<EnergyBreakdown> run_sweep(const io::SweepSpec& s, const std::vector<double>& grid) {
  std::vector<EnergyBreakdown> rows(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        rows[i] = sweep_point(s, grid[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int threads = sweep_threads(static_cast<int>(grid.size()));
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

void write_sweep_csv(std::ostream& out, const io::SweepSpec& s, const std::vector<double>& grid,
                     const std::vector<EnergyBreakdown>& rows) {
  out << io::axis_name(s.axis) << ",total,dirichlet,boundary,penalty,trace\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& e = rows[i];
    out << grid[i] << ',' << e.total << ',' << e.dirichlet << ',' << e.boundary << ',' << e.penalty
        << ',' << e.trace << '\n';
  }
}

void print(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

/// (E(eps) - Per(B_1) Theta(1)) / eps for the thin-shell competitor.
double shell_quotient(int n, const DissipationLaw& law, double eps) {
  const double e = radial::perturbation_expansion(n, law, eps).energy_eps;
  return (e - unit_sphere_area(n) * eval(law, 1.0)) / eps;
}

struct Options {
  // radial / regime / verify perturbation / verify regimes
  int n = 2;
  std::string law = R"({"type":"convection","beta":1})";
  double R = 1.0;
  double lambda = 0.0;
  double beta = 1.0;
  double rmax = 2.0;
  double eps = 1e-3;
  // sweep
  std::string sweep_spec;
  std::string out_path;
  // solve / optimize / verify h|truncation
  std::string pair;
  std::string mesh;
  double tol = 1e-10;
  std::string field_path;
  std::string mode;
  double M = std::numeric_limits<double>::quiet_NaN();
  int order = 4;
  int max_iters = 500;
  int levels = 64;
  int thresholds = 64;
  std::string levels_csv;
  std::string trace_path;
  bool expect_improvement = false;
};

Mesh mesh_or_default(const Options& o) { return o.mesh.empty() ? Mesh{} : parse_mesh(o.mesh); }

int cmd_radial(const Options& o, std::ostream& out) {
  const DissipationLaw law = io::law_from_json(io::parse_argument(o.law));
  print(out, io::to_json(radial::general_radial_energy(o.n, law, o.R, o.lambda)));
  return kExitOk;
}

int cmd_regime(const Options& o, std::ostream& out) {
  print(out, io::to_json(radial::classify_regime(o.n, o.beta, o.rmax)));
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const io::SweepSpec spec = io::sweep_from_json(io::parse_argument(o.sweep_spec));
  const std::vector<double> grid = sweep_grid(spec);
  const auto rows = run_sweep(spec, grid);
  if (o.out_path.empty() || o.out_path == "-") {
    write_sweep_csv(out, spec, grid, rows);
  } else {
    auto f = open_output(o.out_path);
    write_sweep_csv(f, spec, grid, rows);
    print(out, json{{"rows", grid.size()}, {"out", o.out_path}});
  }
  return kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out) {
  const StarPair pair = io::pair_from_json(io::parse_argument(o.pair));
  const DissipationLaw law = io::law_from_json(io::parse_argument(o.law));
  const Mesh mesh = mesh_or_default(o);
  const StateSolution sol = solve_state(pair, law, mesh, o.tol);
  if (!o.out_path.empty()) {
    auto f = open_output(o.out_path);
    write_field_csv(f, sol.field, pair);
  }
  print(out, json{{"energy", io::to_json(sol.energy)},
                  {"iterations", sol.iterations},
                  {"mesh", {mesh.n_s, mesh.n_theta}},
                  {"min", sol.field.min()},
                  {"max", sol.field.max()}});
  return kExitOk;
}

int cmd_optimize(const Options& o, std::ostream& out) {
  const DissipationLaw law = io::law_from_json(io::parse_argument(o.law));
  const StarPair init = io::pair_from_json(io::parse_argument(o.pair));
  OptimizeOptions opts;
  opts.fourier_order = o.order;
  opts.max_outer_iters = o.max_iters;
  opts.mesh = mesh_or_default(o);
  OptimizeResult r = [&] {
    if (o.mode == "constrained") {
      if (std::isnan(o.M)) throw std::invalid_argument("optimize: constrained mode needs --M");
      return optimize_constrained(law, o.M, init, opts);
    }
    if (o.mode == "penalized") {
      if (!(o.lambda > 0.0)) throw std::invalid_argument("optimize: penalized mode needs --lambda > 0");
      return optimize_penalized(law, o.lambda, init, opts);
    }
    throw std::invalid_argument("optimize: --mode must be constrained or penalized");
  }();
  if (!o.trace_path.empty()) {
    auto f = open_output(o.trace_path);
    write_trace_csv(f, r.trace);
  }
  print(out, json{{"pair", io::to_json(r.pair)},
                  {"energy", io::to_json(r.energy)},
                  {"deficit", r.deficit},
                  {"collapsed", r.collapsed},
                  {"iterations", r.iterations},
                  {"reason", std::string(stop_reason_name(r.reason))},
                  {"inner_area", area(r.pair.inner())},
                  {"outer_area", area(r.pair.outer())}});
  return kExitOk;
}

std::pair<ScalarField, StarPair> field_for(const Options& o, const DissipationLaw& law) {
  if (!o.field_path.empty()) {
    std::ifstream f(o.field_path);
    if (!f) throw std::invalid_argument("cannot open field file '" + o.field_path + "'");
    return read_field_csv(f);
  }
  const StarPair pair = io::pair_from_json(io::parse_argument(o.pair));
  return {solve_state(pair, law, mesh_or_default(o), o.tol).field, pair};
}

int report(std::ostream& out, json j, bool passes) {
  j["passes"] = passes;
  print(out, j);
  return passes ? kExitOk : kExitVerifyFailed;
}

int cmd_verify_h(const Options& o, std::ostream& out) {
  const auto [field, pair] = field_for(o, DissipationLaw::convection(o.beta));
  const HInequality h = h_inequality_check(field, pair, o.beta, o.levels);
  if (!o.levels_csv.empty()) {
    auto f = open_output(o.levels_csv);
    write_levels_csv(f, decompose_at(field, pair, h.levels), h.H);
  }
  return report(out,
                {{"check", "h"}, {"energy", h.energy}, {"min_H", h.min_H},
                 {"weighted_integral", h.weighted_integral}, {"levels", h.levels.size()}},
                h.passes);
}

int cmd_verify_truncation(const Options& o, std::ostream& out) {
  const DissipationLaw law = io::law_from_json(io::parse_argument(o.law));
  const auto [field, pair] = field_for(o, law);
  const TruncationScan s = truncation_scan(field, pair, law, o.thresholds);
  const bool monotone = s.best_energy <= s.baseline_energy;
  return report(out,
                {{"check", "truncation"}, {"baseline_energy", s.baseline_energy},
                 {"best_t", s.best_t}, {"best_energy", s.best_energy}, {"improved", s.improved}},
                monotone && (s.improved || !o.expect_improvement));
}

int cmd_verify_perturbation(const Options& o, std::ostream& out) {
  const DissipationLaw law = io::law_from_json(io::parse_argument(o.law));
  const auto pe = radial::perturbation_expansion(o.n, law, o.eps);
  // Second-order Richardson extrapolation of the quotient to eps -> 0.
  const double q1 = shell_quotient(o.n, law, o.eps);
  const double q2 = shell_quotient(o.n, law, o.eps / 2);
  const double q4 = shell_quotient(o.n, law, o.eps / 4);
  const double r1 = 2 * q2 - q1, r2 = 2 * q4 - q2;
  const double limit = (4 * r2 - r1) / 3;
  const double scale = unit_sphere_area(o.n);
  const double coeff = pe.first_order_coeff;
  const bool passes = std::abs(coeff) >= 1e-6 * scale
                          ? std::abs(q1 - coeff) <= 0.05 * std::abs(coeff)
                          : std::abs(limit) < 1e-6 * scale;
  const FlatCriterion flat = flat_criterion(law, o.n);
  return report(out,
                {{"check", "perturbation"}, {"eps", o.eps}, {"energy_eps", pe.energy_eps},
                 {"first_order_coeff", coeff}, {"quotient", q1}, {"extrapolated_quotient", limit},
                 {"flat_optimal_for_small_M", flat.flat_optimal_for_small_M}},
                passes);
}

int cmd_verify_regimes(const Options& o, std::ostream& out) {
  const radial::RegimeReport r = radial::classify_regime(o.n, o.beta, o.rmax);
  // Brute-force scan of the closed-form energy over [1, rmax].
  constexpr int kScan = 20001;
  double scan_min = std::numeric_limits<double>::infinity(), scan_arg = 1.0;
  for (double R : numerics::linspace(1.0, o.rmax, kScan)) {
    const double e = radial::convection_energy(o.n, o.beta, R).total;
    if (e < scan_min) scan_min = e, scan_arg = R;
  }
  const double e1 = radial::convection_energy(o.n, o.beta, 1.0).total;
  const double tol = 1e-9 * std::max(1.0, std::abs(scan_min));
  bool passes = r.optimal_energy <= scan_min + tol &&
                std::abs(radial::convection_energy(o.n, o.beta, r.optimal_radius).total - r.optimal_energy) <= tol;
  double threshold_gap = 0.0;
  if (r.threshold_radius) {
    threshold_gap = radial::convection_energy(o.n, o.beta, *r.threshold_radius).total - e1;
    passes = passes && std::abs(threshold_gap) <= 1e-8 * e1;
  }
  json j = io::to_json(r);
  j["check"] = "regimes";
  j["scan_min_energy"] = scan_min;
  j["scan_argmin"] = scan_arg;
  j["threshold_energy_gap"] = threshold_gap;
  return report(out, j, passes);
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal thermal insulation: radial formulas, annulus solver, shape optimizer"};
  app.require_subcommand(1);
  Options o;

  const auto law_opt = [&](CLI::App* c) {
    c->add_option("--law", o.law, "dissipation law as JSON (inline or file)");
  };
  const auto mesh_opts = [&](CLI::App* c) {
    c->add_option("--mesh", o.mesh, "n_s,n_theta");
    c->add_option("--tol", o.tol, "state solver tolerance");
  };

  auto* radial_cmd = app.add_subcommand("radial", "energy of concentric balls (B_1, B_R)");
  radial_cmd->add_option("--n", o.n, "dimension");
  law_opt(radial_cmd);
  radial_cmd->add_option("--R", o.R, "outer radius")->required();
  radial_cmd->add_option("--lambda", o.lambda, "volume penalty weight");

  auto* regime_cmd = app.add_subcommand("regime", "classify the convection regime");
  regime_cmd->add_option("--n", o.n, "dimension");
  regime_cmd->add_option("--beta", o.beta, "convection coefficient")->required();
  regime_cmd->add_option("--rmax", o.rmax, "largest admissible outer radius")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep of radial energies to CSV");
  sweep_cmd->add_option("--spec", o.sweep_spec, "sweep JSON (inline or file)")->required();
  sweep_cmd->add_option("--out", o.out_path, "CSV path, '-' for stdout");

  auto* solve_cmd = app.add_subcommand("solve", "solve the state equation on a star-shaped annulus");
  solve_cmd->add_option("--pair", o.pair, "star pair JSON (inline or file)")->required();
  law_opt(solve_cmd);
  mesh_opts(solve_cmd);
  solve_cmd->add_option("--out-field", o.out_path, "field CSV path");

  auto* opt_cmd = app.add_subcommand("optimize", "shape optimization of (K, Omega)");
  opt_cmd->add_option("--mode", o.mode, "constrained or penalized")->required();
  law_opt(opt_cmd);
  opt_cmd->add_option("--M", o.M, "volume bound for constrained mode");
  opt_cmd->add_option("--lambda", o.lambda, "penalty weight for penalized mode");
  opt_cmd->add_option("--init", o.pair, "initial star pair JSON")->required();
  opt_cmd->add_option("--trace", o.trace_path, "trace CSV path");
  opt_cmd->add_option("--order", o.order, "Fourier order");
  opt_cmd->add_option("--max-iters", o.max_iters, "outer iteration cap");
  opt_cmd->add_option("--mesh", o.mesh, "n_s,n_theta");

  auto* verify_cmd = app.add_subcommand("verify", "numerical checks with pass/fail report");
  verify_cmd->require_subcommand(1);
  auto* vh = verify_cmd->add_subcommand("h", "H-function inequality on a solved convection field");
  vh->add_option("--pair", o.pair, "star pair JSON");
  vh->add_option("--field", o.field_path, "field CSV instead of solving");
  vh->add_option("--beta", o.beta, "convection coefficient");
  vh->add_option("--levels", o.levels, "number of levels");
  vh->add_option("--levels-csv", o.levels_csv, "per-level CSV path");
  mesh_opts(vh);
  auto* vt = verify_cmd->add_subcommand("truncation", "truncation scan u 1_{u>t}");
  vt->add_option("--pair", o.pair, "star pair JSON");
  vt->add_option("--field", o.field_path, "field CSV instead of solving");
  law_opt(vt);
  vt->add_option("--thresholds", o.thresholds, "number of thresholds");
  vt->add_flag("--expect-improvement", o.expect_improvement, "fail unless some threshold improves");
  mesh_opts(vt);
  auto* vp = verify_cmd->add_subcommand("perturbation", "thin-shell first-order coefficient");
  vp->add_option("--n", o.n, "dimension");
  law_opt(vp);
  vp->add_option("--eps", o.eps, "shell thickness");
  auto* vr = verify_cmd->add_subcommand("regimes", "regime classification against a brute-force scan");
  vr->add_option("--n", o.n, "dimension");
  vr->add_option("--beta", o.beta, "convection coefficient")->required();
  vr->add_option("--rmax", o.rmax, "largest admissible outer radius")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (*radial_cmd) return cmd_radial(o, out);
    if (*regime_cmd) return cmd_regime(o, out);
    if (*sweep_cmd) return cmd_sweep(o, out);
    if (*solve_cmd) return cmd_solve(o, out);
    if (*opt_cmd) return cmd_optimize(o, out);
    if (*vh) {
      if (o.pair.empty() && o.field_path.empty()) throw std::invalid_argument("verify h: need --pair or --field");
      return cmd_verify_h(o, out);
    }
    if (*vt) {
      if (o.pair.empty() && o.field_path.empty())
        throw std::invalid_argument("verify truncation: need --pair or --field");
      return cmd_verify_truncation(o, out);
    }
    if (*vp) return cmd_verify_perturbation(o, out);
    if (*vr) return cmd_verify_regimes(o, out);
  } catch (const NonConvergence& e) {
    err << "error: solver did not converge after " << e.iterations() << " iterations: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  err << "error: no subcommand\n";
  return kExitInvalid;
}

}  // namespace thermoshield
