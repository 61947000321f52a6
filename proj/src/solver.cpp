#include "delayvar/solver.hpp"

#include "delayvar/euler_lagrange.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace delayvar {

void SolveConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("solver config: " + what); };
  if (N < 2) fail("N must be at least 2");
  if (max_iters < 0) fail("max_iters must be non-negative");
  if (!(grad_tol > 0.0)) fail("grad_tol must be positive");
  if (!(armijo > 0.0 && armijo < 1.0)) fail("armijo must lie in (0, 1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) fail("backtrack must lie in (0, 1)");
  if (!(initial_step > 0.0)) fail("initial_step must be positive");
  if (!(min_step > 0.0)) fail("min_step must be positive");
  if (subsamples < 2 || subsamples % 2 != 0) fail("subsamples must be even and at least 2");
}

Eigen::MatrixXd metric_matrix(const PerturbationBasis& basis, Metric metric) {
  const auto size = static_cast<Eigen::Index>(basis.size());
  if (metric == Metric::L2) return Eigen::MatrixXd::Identity(size, size);

  const double h = basis.grid().step();
  const double h2 = h * h;
  Eigen::Matrix4d K;
  K << 36, 3 * h, -36, 3 * h,
       3 * h, 4 * h2, -3 * h, -h2,
       -36, -3 * h, 36, -3 * h,
       3 * h, -h2, -3 * h, 4 * h2;
  K /= 30.0 * h;
  Eigen::Matrix4d M;
  M << 156, 22 * h, 54, -13 * h,
       22 * h, 4 * h2, 13 * h, -3 * h2,
       54, 13 * h, 156, -22 * h,
       -13 * h, -3 * h2, -22 * h, 4 * h2;
  M *= h / 420.0;
  const Eigen::Matrix4d E = K + M;

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index k = 0; k < basis.dim(); ++k) {
    for (int j = 0; j < basis.grid().intervals(); ++j) {
      const long idx[4] = {basis.index_of(k, j, Dof::Kind::Value), basis.index_of(k, j, Dof::Kind::Slope),
                           basis.index_of(k, j + 1, Dof::Kind::Value), basis.index_of(k, j + 1, Dof::Kind::Slope)};
      for (int a = 0; a < 4; ++a) {
        if (idx[a] < 0) continue;
        for (int b = 0; b < 4; ++b) {
          if (idx[b] >= 0) G(idx[a], idx[b]) += E(a, b);
        }
      }
    }
  }
  return G;
}

SolveResult minimize(const DelayLagrangian& p, const HistoryFunction& psi, const Vector& zeta,
                     const SolveConfig& cfg) {
  cfg.validate();
  if (psi.dim() != p.dim() || zeta.size() != p.dim()) {
    throw std::invalid_argument("minimize: history or endpoint dimension does not match the problem");
  }
  if (psi.horizon() != p.delay()) throw std::invalid_argument("minimize: history horizon differs from the delay");

  Trajectory x = affine_initial_guess(psi, zeta, p.horizon(), cfg.N);
  const PerturbationBasis basis(x.grid(), p.dim(), p.delay());
  const QuadratureRule rule = make_rule(p, x, cfg.subsamples);
  const Eigen::LLT<Eigen::MatrixXd> gram(metric_matrix(basis, cfg.metric));
  if (gram.info() != Eigen::Success) throw std::logic_error("minimize: metric matrix is not positive definite");

  SolveResult res{.trajectory = x};
  double J = evaluate_J(p, x, rule);
  res.J_history.push_back(J);

  for (;;) {
    const Eigen::VectorXd G = gradient(p, x, basis, rule);
    res.grad_norm = G.size() ? G.cwiseAbs().maxCoeff() : 0.0;
    if (!std::isfinite(res.grad_norm) || !std::isfinite(J)) {
      res.diagnostic = "non-finite criterion or gradient";
      break;
    }
    if (res.grad_norm <= cfg.grad_tol) {
      res.converged = true;
      break;
    }
    if (res.iterations >= cfg.max_iters) {
      std::ostringstream os;
      os << "max_iters reached with gradient sup-norm " << res.grad_norm;
      res.diagnostic = os.str();
      break;
    }

    const Eigen::VectorXd d = -gram.solve(G);
    const double slope = G.dot(d);
    const Perturbation dir = basis.combine(d);

    double alpha = cfg.initial_step;
    bool accepted = false;
    while (alpha >= cfg.min_step) {
      Trajectory trial = x.plus(dir, alpha);
      const double Jt = evaluate_J(p, trial, rule);
      if (Jt < J && Jt <= J + cfg.armijo * alpha * slope) {
        x = std::move(trial);
        J = Jt;
        accepted = true;
        break;
      }
      alpha *= cfg.backtrack;
    }
    if (!accepted) {
      std::ostringstream os;
      os << "line search found no decrease down to step " << cfg.min_step << " (gradient sup-norm "
         << res.grad_norm << ", J " << J << ")";
      res.diagnostic = os.str();
      break;
    }
    ++res.iterations;
    res.J_history.push_back(J);
    res.steps.push_back(alpha);
    if (cfg.on_iteration) cfg.on_iteration({res.iterations, J, res.grad_norm, alpha});
  }
  res.trajectory = x;
  return res;
}

ConvergenceTable convergence_study(const DelayLagrangian& p, const HistoryFunction& psi, const Vector& zeta,
                                   const SolveConfig& cfg, const std::vector<int>& levels) {
  if (levels.empty()) throw std::invalid_argument("convergence_study: no grid levels");
  ConvergenceTable table;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (int N : levels) {
    SolveConfig c = cfg;
    c.N = N;
    std::optional<SolveResult> run;
    try {
      run = minimize(p, psi, zeta, c);
    } catch (const std::invalid_argument& e) {
      // a level the delay does not fit; the other levels still run
      table.rows.push_back({N, nan, nan, nan, nan, false, 0, e.what()});
      continue;
    }
    const SolveResult& r = *run;
    const QuadratureRule rule = make_rule(p, r.trajectory, c.subsamples);
    const PerturbationBasis basis(r.trajectory.grid(), p.dim(), p.delay());
    const ELReport el = el_data(p, r.trajectory, rule);
    table.rows.push_back({N, r.J_history.back(), r.grad_norm, el.residual_osc,
                          weak_stationarity(p, r.trajectory, basis, rule), r.converged, r.iterations, r.diagnostic});
  }
  table.residual_monotone = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (!(table.rows[i].residual_osc < table.rows[i - 1].residual_osc)) table.residual_monotone = false;
  }
  return table;
}

}  // namespace delayvar
