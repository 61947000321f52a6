#include "delayvar/commands.hpp"

#include "delayvar/config.hpp"
#include "delayvar/criterion.hpp"
#include "delayvar/euler_lagrange.hpp"
#include "delayvar/identity.hpp"
#include "delayvar/report.hpp"
#include "delayvar/solver.hpp"

#include <cstdlib>
#include <exception>

namespace delayvar {

LogLevel log_level_from_env() {
  const char* v = std::getenv("DELAYVAR_LOG");
  if (v == nullptr) return LogLevel::Info;
  const std::string s(v);
  if (s == "quiet") return LogLevel::Quiet;
  if (s == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

namespace {

class Logger {
 public:
  Logger(std::ostream& os, LogLevel level) : os_(os), level_(level) {}
  bool info() const { return level_ != LogLevel::Quiet; }
  bool debug() const { return level_ == LogLevel::Debug; }
  std::ostream& out() { return os_; }

 private:
  std::ostream& os_;
  LogLevel level_;
};

// Loads and validates the configuration, applies the command-line overrides
// and creates the output directory.
RunConfig prepare(const CommandOptions& opts) {
  RunConfig cfg = load_config(opts.config);
  if (opts.out_dir) cfg.output_dir = *opts.out_dir;
  if (opts.seed) {
    cfg.solver.seed = *opts.seed;
    cfg.identity.seed = *opts.seed;
  }
  if (opts.threshold) {
    if (!(*opts.threshold > 0.0)) throw ConfigError("--threshold must be positive");
    cfg.verify_threshold = *opts.threshold;
  }
  std::filesystem::create_directories(cfg.output_dir);
  return cfg;
}

// Throws std::invalid_argument with the snapping explanation when N does not
// resolve the delay exactly.
void check_grid(const RunConfig& cfg, int N) { Grid(cfg.T, N).delay_steps(cfg.r); }

const char* metric_name(Metric m) { return m == Metric::H1 ? "h1" : "l2"; }

// Deterministic direction for the exchange-identity check.
Perturbation check_direction(const RunConfig& cfg, const Grid& grid) {
  Random rng(cfg.solver.seed);
  return random_perturbation(rng, cfg.n, cfg.r, grid);
}

}  // namespace

int cmd_solve(const CommandOptions& opts, std::ostream& log_stream) {
  Logger log(log_stream, opts.log);
  RunConfig cfg;
  std::unique_ptr<DelayLagrangian> prob;
  std::optional<HistoryFunction> psi;
  try {
    cfg = prepare(opts);
    check_grid(cfg, cfg.solver.N);
    prob = make_problem(cfg);
    psi = make_history(cfg);
  } catch (const std::exception& e) {
    log.out() << "error: " << e.what() << "\n";
    return exit_code::config_error;
  }

  try {
    SolveConfig sc = cfg.solver;
    if (log.info()) {
      sc.on_iteration = [&log](const IterationLog& it) {
        log.out() << "iter " << it.iteration << " J " << format_number(it.J) << " grad " << format_number(it.grad_norm)
                  << " step " << format_number(it.step) << "\n";
      };
    }
    const SolveResult res = minimize(*prob, *psi, cfg.zeta, sc);
    const Trajectory& x = res.trajectory;
    const QuadratureRule rule = make_rule(*prob, x, sc.subsamples);
    const PerturbationBasis basis(x.grid(), cfg.n, cfg.r);
    const ELReport el = el_data(*prob, x, rule);
    const double ws = weak_stationarity(*prob, x, basis, rule);
    const FubiniCheck fc = fubini_identity_check(*prob, x, check_direction(cfg, x.grid()), rule);
    if (log.debug()) log.out() << "quadrature breakpoints " << rule.breakpoints.size() << "\n";

    const auto& dir = cfg.output_dir;
    write_trajectory_csv(dir / "trajectory.csv", x);
    write_el_report_csv(dir / "el_report.csv", el);
    write_key_value_csv(dir / "summary.csv",
                        {{"problem", cfg.problem},
                         {"n", std::to_string(cfg.n)},
                         {"r", format_number(cfg.r)},
                         {"T", format_number(cfg.T)},
                         {"N", std::to_string(sc.N)},
                         {"metric", metric_name(sc.metric)},
                         {"iterations", std::to_string(res.iterations)},
                         {"converged", res.converged ? "true" : "false"},
                         {"J", format_number(res.J_history.back())},
                         {"grad_norm", format_number(res.grad_norm)},
                         {"residual_osc", format_number(el.residual_osc)},
                         {"weak_stationarity", format_number(ws)},
                         {"fubini_lhs", format_number(fc.lhs)},
                         {"fubini_rhs", format_number(fc.rhs)},
                         {"diagnostic", res.diagnostic}});
    write_plot_svg(dir / "plot.svg", x, el);

    if (log.info()) {
      log.out() << (res.converged ? "converged" : "not converged") << " after " << res.iterations
                << " iterations: J " << format_number(res.J_history.back()) << ", residual_osc "
                << format_number(el.residual_osc) << "\n";
      if (!res.diagnostic.empty()) log.out() << "diagnostic: " << res.diagnostic << "\n";
    }
    return res.converged ? exit_code::ok : exit_code::not_converged;
  } catch (const std::exception& e) {
    log.out() << "error: " << e.what() << "\n";
    return exit_code::config_error;
  }
}

int cmd_verify(const CommandOptions& opts, std::ostream& log_stream) {
  Logger log(log_stream, opts.log);
  try {
    const RunConfig cfg = prepare(opts);
    check_grid(cfg, cfg.solver.N);
    const auto prob = make_problem(cfg);
    const HistoryFunction psi = make_history(cfg);
    const Grid grid(cfg.T, cfg.solver.N);
    const TrajectoryData data = read_trajectory_csv(opts.trajectory, grid, cfg.n);
    const Trajectory x(psi, grid, data.values, data.slopes);

    const QuadratureRule rule = make_rule(*prob, x, cfg.solver.subsamples);
    const PerturbationBasis basis(grid, cfg.n, cfg.r);
    const ELReport el = el_data(*prob, x, rule);
    const double ws = weak_stationarity(*prob, x, basis, rule);
    const FubiniCheck fc = fubini_identity_check(*prob, x, check_direction(cfg, grid), rule);
    const bool pass = el.residual_osc <= cfg.verify_threshold;

    write_el_report_csv(cfg.output_dir / "el_report.csv", el);
    write_key_value_csv(cfg.output_dir / "verify.csv", {{"residual_osc", format_number(el.residual_osc)},
                                                         {"threshold", format_number(cfg.verify_threshold)},
                                                         {"weak_stationarity", format_number(ws)},
                                                         {"fubini_lhs", format_number(fc.lhs)},
                                                         {"fubini_rhs", format_number(fc.rhs)},
                                                         {"pass", pass ? "true" : "false"}});
    if (log.info()) {
      log.out() << "residual_osc " << format_number(el.residual_osc) << " (threshold "
                << format_number(cfg.verify_threshold) << "), weak_stationarity " << format_number(ws) << "\n";
    }
    return pass ? exit_code::ok : exit_code::check_failed;
  } catch (const std::exception& e) {
    log.out() << "error: " << e.what() << "\n";
    return exit_code::config_error;
  }
}

int cmd_identity(const CommandOptions& opts, std::ostream& log_stream) {
  Logger log(log_stream, opts.log);
  RunConfig cfg;
  try {
    cfg = prepare(opts);
  } catch (const std::exception& e) {
    log.out() << "error: " << e.what() << "\n";
    return exit_code::config_error;
  }
  try {
    const IdentityReport rep = run_identity_suites(cfg.identity);
    write_identity_csv(cfg.output_dir / "identity_report.csv", rep);
    if (log.info()) {
      for (const auto& c : rep.checks) {
        log.out() << c.name << ": " << c.cases << " cases, max discrepancy " << format_number(c.max_discrepancy)
                  << " (tolerance " << format_number(c.tolerance) << ") " << (c.pass ? "pass" : "FAIL") << "\n";
      }
    }
    return rep.all_pass() ? exit_code::ok : exit_code::check_failed;
  } catch (const std::exception& e) {
    log.out() << "error: " << e.what() << "\n";
    return exit_code::config_error;
  }
}

int cmd_converge(const CommandOptions& opts, std::ostream& log_stream) {
  Logger log(log_stream, opts.log);
  RunConfig cfg;
  std::unique_ptr<DelayLagrangian> prob;
  std::optional<HistoryFunction> psi;
  try {
    cfg = prepare(opts);
    for (int N : cfg.levels) check_grid(cfg, N);
    prob = make_problem(cfg);
    psi = make_history(cfg);
  } catch (const std::exception& e) {
    log.out() << "error: " << e.what() << "\n";
    return exit_code::config_error;
  }
  try {
    const ConvergenceTable table = convergence_study(*prob, *psi, cfg.zeta, cfg.solver, cfg.levels);
    write_levels_csv(cfg.output_dir / "levels.csv", table);
    if (log.info()) {
      for (const auto& r : table.rows) {
        log.out() << "N " << r.N << " J " << format_number(r.J) << " residual_osc " << format_number(r.residual_osc)
                  << " weak_stationarity " << format_number(r.weak_stationarity)
                  << (r.converged ? "" : " (not converged)") << "\n";
      }
    }
    return table.residual_monotone ? exit_code::ok : exit_code::check_failed;
  } catch (const std::exception& e) {
    log.out() << "error: " << e.what() << "\n";
    return exit_code::config_error;
  }
}

}  // namespace delayvar
