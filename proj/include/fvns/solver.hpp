#ifndef FVNS_SOLVER_HPP
#define FVNS_SOLVER_HPP

#include "fvns/fields.hpp"
#include "fvns/flux.hpp"
#include "fvns/grid.hpp"
#include "fvns/model.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fvns {

/// Density and velocity at one time level.
struct State {
  double time = 0.0;
  ScalarFieldd rho;
  VectorFieldd u;

  /// Cellwise momentum rho u.
  VectorFieldd momentum() const { return u.array().colwise() * rho.array(); }
};

struct SolverConfig {
  double cfl = 0.3;
  std::optional<double> dt_cap;
  /// Relative sup-norm change between fixed-point iterates.
  double picard_tol = 1e-10;
  int picard_max_iter = 50;
  /// Relative residual of every linear sub-solve.
  double linear_tol = 1e-12;
  int linear_max_iter = 2000;
  /// Times a failed step is retried with half the time step.
  int max_retries = 3;

  std::vector<std::string> violations() const;
  void validate() const;
};

/// Per-step diagnostics. Step 0 describes the initial state.
struct StepReport {
  Index step = 0;
  double time = 0.0;
  double dt = 0.0;
  int picard_iterations = 0;
  /// Last relative fixed-point change.
  double picard_residual = 0.0;
  /// max over cells of |dt * residual| of the per-cell scheme.
  double nonlinear_residual = 0.0;
  int linear_iterations = 0;
  double linear_residual = 0.0;
  int retries = 0;
  double mass = 0.0;
  double energy = 0.0;
  double energy_slack = 0.0;
  double min_rho = 0.0;
  double max_u = 0.0;
};

/// A time step that could not be completed (fixed point or linear solver
/// did not converge, or the density lost positivity).
class StepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LinearSolveInfo {
  int iterations = 0;
  double residual = 0.0;
};

/// dt = CFL h / max_K (|u_K| + c(rho_K)), capped by config.dt_cap.
double compute_dt(const Grid& grid, const State& state, const GasModeld& model, const SolverConfig& config);

/// Continuity row with the advecting velocity frozen: F_h is linear in the
/// new density, giving an M-matrix system.
ScalarFieldd solve_continuity(const Grid& grid, const ScalarFieldd& rho_prev, const VectorFieldd& u_frozen,
                              double dt, const FluxParamsd& params, const SolverConfig& config,
                              LinearSolveInfo* info = nullptr, const ScalarFieldd* guess = nullptr);

/// Momentum rows for all components as one coupled system. Upwind
/// direction and |avg(v).n| come from u_frozen, the transported rho_new u
/// is implicit, pressure is evaluated from rho_new, viscous terms are
/// implicit, forcing is sampled at cell centres at prev.time + dt.
VectorFieldd solve_momentum(const Grid& grid, const State& prev, const ScalarFieldd& rho_new,
                            const VectorFieldd& u_frozen, double dt, const GasModeld& model, const Forcing& forcing,
                            const FluxParamsd& params, const SolverConfig& config, LinearSolveInfo* info = nullptr);

struct SchemeResidual {
  ScalarFieldd continuity;
  VectorFieldd momentum;

  /// max |dt * residual| over both rows
  double max_scaled(double dt) const;
};

/// Residual of the nonlinear per-cell scheme for the pair (prev, next),
/// evaluated through the face-flux kernels.
SchemeResidual scheme_residual(const Grid& grid, const State& prev, const State& next, const GasModeld& model,
                               const Forcing& forcing, const FluxParamsd& params);

/// One backward Euler step solved by fixed-point iteration. Throws
/// StepFailure when the iteration does not converge.
std::pair<State, StepReport> picard_step(const Grid& grid, const State& prev, double dt, const GasModeld& model,
                                         const Forcing& forcing, const SolverConfig& config,
                                         const FluxParamsd& params);

using StepObserver = std::function<void(const State&, const StepReport&)>;

struct RunResult {
  State final_state;
  std::vector<StepReport> reports;
};

/// Advances from initial.time to final_time with the CFL step, clipping the
/// last step onto final_time. The observer sees the initial state (step 0)
/// and every accepted step.
RunResult run(const Grid& grid, const State& initial, double final_time, const GasModeld& model,
              const Forcing& forcing, const SolverConfig& config, const FluxParamsd& params,
              const StepObserver& observer = {});

}  // namespace fvns

#endif  // FVNS_SOLVER_HPP
