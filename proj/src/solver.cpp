#include "fvns/solver.hpp"

#include "fvns/diagnostics.hpp"
#include "fvns/flux.hpp"
#include "fvns/operators.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fvns {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

Eigen::VectorXd krylov_solve(const SparseMatrix& matrix, const Eigen::VectorXd& rhs, const Eigen::VectorXd& guess,
                             const SolverConfig& config, LinearSolveInfo* info, const char* what) {
  Eigen::BiCGSTAB<SparseMatrix> solver;
  solver.setTolerance(config.linear_tol);
  solver.setMaxIterations(config.linear_max_iter);
  solver.compute(matrix);
  Eigen::VectorXd x = solver.solveWithGuess(rhs, guess);
  const double rhs_norm = rhs.norm();
  const double residual = rhs_norm > 0 ? (matrix * x - rhs).norm() / rhs_norm : (matrix * x).norm();
  // the recursive residual that stops BiCGSTAB can drift slightly from the true one
  if (solver.info() != Eigen::Success || !x.allFinite() || residual > 10.0 * config.linear_tol) {
    std::ostringstream msg;
    msg << what << ": linear solver did not reach tolerance " << config.linear_tol << " (relative residual "
        << residual << " after " << solver.iterations() << " iterations)";
    throw StepFailure(msg.str());
  }
  if (info) {
    info->iterations += static_cast<int>(solver.iterations());
    info->residual = std::max(info->residual, residual);
  }
  return x;
}

double relative_change(const Eigen::Ref<const Eigen::MatrixXd>& next, const Eigen::Ref<const Eigen::MatrixXd>& prev) {
  if (next.size() == 0) return 0.0;
  return (next - prev).cwiseAbs().maxCoeff() / (1.0 + next.cwiseAbs().maxCoeff());
}

}  // namespace

std::vector<std::string> SolverConfig::violations() const {
  std::vector<std::string> out;
  if (!(cfl > 0 && cfl <= 1)) out.push_back("solver.cfl must lie in (0, 1]");
  if (dt_cap && !(*dt_cap > 0)) out.push_back("solver.dt_cap must be > 0");
  if (!(picard_tol > 0)) out.push_back("solver.picard_tol must be > 0");
  if (picard_max_iter < 1) out.push_back("solver.picard_max_iter must be >= 1");
  if (!(linear_tol > 0)) out.push_back("solver.linear_tol must be > 0");
  if (linear_max_iter < 1) out.push_back("solver.linear_max_iter must be >= 1");
  if (max_retries < 0) out.push_back("solver.max_retries must be >= 0");
  return out;
}

void SolverConfig::validate() const {
  const auto v = violations();
  if (!v.empty()) throw std::invalid_argument(v.front());
}

double compute_dt(const Grid& grid, const State& state, const GasModeld& model, const SolverConfig& config) {
  if (!state.rho.allFinite() || !state.u.allFinite()) throw std::domain_error("compute_dt: non-finite state");
  double max_speed = 0.0;
  for (Index k = 0; k < grid.cell_count(); ++k) {
    max_speed = std::max(max_speed, state.u.row(k).norm() + model.sound_speed(state.rho(k)));
  }
  double dt = config.cfl * grid.h() / max_speed;
  if (config.dt_cap) dt = std::min(dt, *config.dt_cap);
  return dt;
}

ScalarFieldd solve_continuity(const Grid& grid, const ScalarFieldd& rho_prev, const VectorFieldd& u_frozen, double dt,
                              const FluxParamsd& params, const SolverConfig& config, LinearSolveInfo* info,
                              const ScalarFieldd* guess) {
  const Index n = grid.cell_count();
  const double diffusion = params.diffusion();
  std::vector<Triplet> triplets;
  triplets.reserve(n * (1 + 4 * grid.dim()));
  for (Index k = 0; k < n; ++k) triplets.emplace_back(k, k, 1.0 / dt);
  for (int i = 0; i < grid.dim(); ++i) {
    const double inv_h = grid.face_area(i) / grid.cell_volume();
    for (Index k = 0; k < n; ++k) {
      const Index l = grid.shift({k}, i, 1).value;
      const double vn = 0.5 * (u_frozen(k, i) + u_frozen(l, i));
      // face flux a_k rho_k + a_l rho_l, leaving k and entering l
      const double a_k = inv_h * (std::max(vn, 0.0) + diffusion);
      const double a_l = inv_h * (std::min(vn, 0.0) - diffusion);
      triplets.emplace_back(k, k, a_k);
      triplets.emplace_back(k, l, a_l);
      triplets.emplace_back(l, k, -a_k);
      triplets.emplace_back(l, l, -a_l);
    }
  }
  SparseMatrix matrix(n, n);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  const Eigen::VectorXd rhs = rho_prev / dt;
  return krylov_solve(matrix, rhs, guess ? *guess : rho_prev, config, info, "continuity");
}

VectorFieldd solve_momentum(const Grid& grid, const State& prev, const ScalarFieldd& rho_new,
                            const VectorFieldd& u_frozen, double dt, const GasModeld& model, const Forcing& forcing,
                            const FluxParamsd& params, const SolverConfig& config, LinearSolveInfo* info) {
  const Index n = grid.cell_count();
  const int d = grid.dim();
  const double diffusion = params.diffusion();
  const double mu = model.mu;
  const double bulk = model.mu + model.lambda;

  ScalarFieldd pressure(n);
  for (Index k = 0; k < n; ++k) pressure(k) = model.pressure(rho_new(k));

  std::vector<Triplet> triplets;
  triplets.reserve(n * d * (1 + 4 * d + 4 * d));
  Eigen::VectorXd rhs(n * d);

  for (int j = 0; j < d; ++j) {
    const Index row0 = j * n;
    for (Index k = 0; k < n; ++k) {
      triplets.emplace_back(row0 + k, row0 + k, rho_new(k) / dt);
      rhs(row0 + k) = prev.rho(k) * prev.u(k, j) / dt;
    }
    // convective and viscous face fluxes a_k u_jk + a_l u_jl
    for (int i = 0; i < d; ++i) {
      const double inv_h = grid.face_area(i) / grid.cell_volume();
      const double visc = mu / grid.face_distance(i);
      for (Index k = 0; k < n; ++k) {
        const Index l = grid.shift({k}, i, 1).value;
        const double vn = 0.5 * (u_frozen(k, i) + u_frozen(l, i));
        const double a_k = inv_h * (rho_new(k) * (std::max(vn, 0.0) + diffusion) + visc);
        const double a_l = inv_h * (rho_new(l) * (std::min(vn, 0.0) - diffusion) - visc);
        triplets.emplace_back(row0 + k, row0 + k, a_k);
        triplets.emplace_back(row0 + k, row0 + l, a_l);
        triplets.emplace_back(row0 + l, row0 + k, -a_k);
        triplets.emplace_back(row0 + l, row0 + l, -a_l);
      }
    }
    // pressure on the faces of axis j
    const double inv_hj = grid.face_area(j) / grid.cell_volume();
    for (Index k = 0; k < n; ++k) {
      const Index l = grid.shift({k}, j, 1).value;
      const double pbar = 0.5 * (pressure(k) + pressure(l));
      rhs(row0 + k) -= inv_hj * pbar;
      rhs(row0 + l) += inv_hj * pbar;
    }
    // -(mu + lambda) (D_{K+e_j} - D_{K-e_j}) / (2 h_j), D = div_h u
    if (bulk != 0.0) {
      for (int i = 0; i < d; ++i) {
        const double c = -bulk / (4.0 * grid.spacing(j) * grid.spacing(i));
        const Index col0 = i * n;
        for (Index k = 0; k < n; ++k) {
          const CellId up = grid.shift({k}, j, 1);
          const CellId down = grid.shift({k}, j, -1);
          triplets.emplace_back(row0 + k, col0 + grid.shift(up, i, 1).value, c);
          triplets.emplace_back(row0 + k, col0 + grid.shift(up, i, -1).value, -c);
          triplets.emplace_back(row0 + k, col0 + grid.shift(down, i, 1).value, -c);
          triplets.emplace_back(row0 + k, col0 + grid.shift(down, i, -1).value, c);
        }
      }
    }
  }

  if (!forcing.is_zero()) {
    const double t = prev.time + dt;
    for (Index k = 0; k < n; ++k) {
      const Point f = forcing(t, grid.cell_center({k}));
      for (int j = 0; j < d; ++j) rhs(j * n + k) += f[j];
    }
  }

  SparseMatrix matrix(n * d, n * d);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  const Eigen::VectorXd guess = Eigen::Map<const Eigen::VectorXd>(u_frozen.data(), n * d);
  const Eigen::VectorXd x = krylov_solve(matrix, rhs, guess, config, info, "momentum");
  return Eigen::Map<const VectorFieldd>(x.data(), n, d);
}

double SchemeResidual::max_scaled(double dt) const {
  double m = continuity.size() ? continuity.cwiseAbs().maxCoeff() : 0.0;
  if (momentum.size()) m = std::max(m, momentum.cwiseAbs().maxCoeff());
  return dt * m;
}

SchemeResidual scheme_residual(const Grid& grid, const State& prev, const State& next, const GasModeld& model,
                               const Forcing& forcing, const FluxParamsd& params) {
  const double dt = next.time - prev.time;
  const Index n = grid.cell_count();
  const int d = grid.dim();
  SchemeResidual res;
  res.continuity = (next.rho - prev.rho) / dt + flux_divergence(grid, mass_flux(grid, next.rho, next.u, params));

  ScalarFieldd pressure(n);
  for (Index k = 0; k < n; ++k) pressure(k) = model.pressure(next.rho(k));
  const ScalarFieldd div = div_h(grid, next.u);
  const auto convective = momentum_flux(grid, next.rho, next.u, params);
  const VectorFieldd m_next = next.momentum();
  const VectorFieldd m_prev = prev.momentum();

  res.momentum.resize(n, d);
  for (int j = 0; j < d; ++j) {
    DualFieldd face = convective[j];
    for (int i = 0; i < d; ++i) {
      face.col(i) -= model.mu * face_jump(grid, next.u.col(j), i) / grid.face_distance(i);
    }
    face.col(j) += face_average(grid, pressure, j) - (model.mu + model.lambda) * face_average(grid, div, j);
    res.momentum.col(j) = (m_next.col(j) - m_prev.col(j)) / dt + flux_divergence(grid, face);
  }
  if (!forcing.is_zero()) {
    for (Index k = 0; k < n; ++k) {
      const Point f = forcing(next.time, grid.cell_center({k}));
      for (int j = 0; j < d; ++j) res.momentum(k, j) -= f[j];
    }
  }
  return res;
}

std::pair<State, StepReport> picard_step(const Grid& grid, const State& prev, double dt, const GasModeld& model,
                                         const Forcing& forcing, const SolverConfig& config,
                                         const FluxParamsd& params) {
  if (!(dt > 0)) throw std::invalid_argument("picard_step: dt must be positive");
  StepReport report;
  report.dt = dt;
  LinearSolveInfo lin;

  ScalarFieldd rho = prev.rho;
  VectorFieldd u = prev.u;
  bool converged = false;
  for (int it = 1; it <= config.picard_max_iter; ++it) {
    ScalarFieldd rho_next = solve_continuity(grid, prev.rho, u, dt, params, config, &lin, &rho);
    if (!(rho_next.minCoeff() > 0)) {
      throw StepFailure("picard_step: density lost positivity (min " + format_real(rho_next.minCoeff()) + ")");
    }
    VectorFieldd u_next = solve_momentum(grid, prev, rho_next, u, dt, model, forcing, params, config, &lin);
    const double change = std::max(relative_change(u_next, u), relative_change(rho_next, rho));
    rho = std::move(rho_next);
    u = std::move(u_next);
    report.picard_iterations = it;
    report.picard_residual = change;
    if (change <= config.picard_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "picard_step: no convergence in " << config.picard_max_iter << " iterations (last change "
        << report.picard_residual << ", dt " << dt << ")";
    throw StepFailure(msg.str());
  }

  State next{prev.time + dt, std::move(rho), std::move(u)};
  report.time = next.time;
  report.linear_iterations = lin.iterations;
  report.linear_residual = lin.residual;
  report.nonlinear_residual = scheme_residual(grid, prev, next, model, forcing, params).max_scaled(dt);
  const EnergyBudget budget = energy_budget(grid, prev, next, dt, model, params, forcing);
  report.mass = total_mass(grid, next.rho);
  report.energy = budget.total_energy;
  report.energy_slack = budget.balance_slack;
  report.min_rho = next.rho.minCoeff();
  report.max_u = next.u.rowwise().norm().maxCoeff();
  return {std::move(next), report};
}

RunResult run(const Grid& grid, const State& initial, double final_time, const GasModeld& model,
              const Forcing& forcing, const SolverConfig& config, const FluxParamsd& params,
              const StepObserver& observer) {
  model.validate();
  config.validate();
  params.validate(model.gamma);

  RunResult result;
  result.final_state = initial;
  State& current = result.final_state;

  StepReport first;
  first.time = initial.time;
  first.mass = total_mass(grid, initial.rho);
  first.energy = total_energy(grid, initial, model);
  first.min_rho = initial.rho.minCoeff();
  first.max_u = initial.u.rowwise().norm().maxCoeff();
  result.reports.push_back(first);
  if (observer) observer(current, first);

  const double end_tol = 1e-12 * std::max(1.0, std::abs(final_time));
  Index step = 0;
  while (final_time - current.time > end_tol) {
    const double remaining = final_time - current.time;
    double dt = compute_dt(grid, current, model, config);
    bool clipped = false;
    if (dt >= remaining - end_tol) {
      dt = remaining;
      clipped = true;
    }
    for (int attempt = 0;; ++attempt) {
      try {
        auto [next, report] = picard_step(grid, current, dt, model, forcing, config, params);
        if (clipped) next.time = report.time = final_time;
        report.step = ++step;
        report.retries = attempt;
        current = std::move(next);
        result.reports.push_back(report);
        if (observer) observer(current, report);
        break;
      } catch (const StepFailure&) {
        if (attempt >= config.max_retries) throw;
        dt *= 0.5;
        clipped = false;
      }
    }
  }
  return result;
}

}  // namespace fvns
