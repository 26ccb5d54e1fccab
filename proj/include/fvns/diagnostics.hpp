#ifndef FVNS_DIAGNOSTICS_HPP
#define FVNS_DIAGNOSTICS_HPP

#include "fvns/fields.hpp"
#include "fvns/flux.hpp"
#include "fvns/grid.hpp"
#include "fvns/model.hpp"
#include "fvns/solver.hpp"

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fvns {

double total_mass(const Grid& grid, const ScalarFieldd& rho);
inline double total_mass(const Grid& grid, const State& state) { return total_mass(grid, state.rho); }

/// integral of rho |u|^2 / 2 + H(rho)
double total_energy(const Grid& grid, const State& state, const GasModeld& model);

/// Terms of the discrete energy balance between two consecutive levels.
struct EnergyBudget {
  double previous_energy = 0.0;
  double total_energy = 0.0;
  /// h^eps sum_sigma |sigma| avg(rho) |[[u]]|^2
  double eps_dissipation = 0.0;
  /// mu ||nabla_E u||^2
  double viscous_grad = 0.0;
  /// (mu + lambda) ||div_h u||^2
  double viscous_div = 0.0;
  /// integral of f . u at the new level; zero without forcing
  double forcing_power = 0.0;
  /// D_t E + dissipation - forcing power; non-positive for exact solutions
  double balance_slack = 0.0;
};

/// h^eps sum_sigma |sigma| avg(rho) |[[u]]|^2
double eps_jump_dissipation(const Grid& grid, const State& state, const FluxParamsd& params);

EnergyBudget energy_budget(const Grid& grid, const State& prev, const State& next, double dt, const GasModeld& model,
                           const FluxParamsd& params, const Forcing& forcing = {});

/// Velocity edge gradient: N x d*d, column j*d + i holds (u_j,L - u_j,K)/h_i
/// on the faces of axis i.
Eigen::MatrixXd velocity_edge_gradient(const Grid& grid, const VectorFieldd& u);

/// ||nabla_E u||^2_{L^2}
double edge_gradient_norm_sq(const Grid& grid, const VectorFieldd& u);

/// ||rho||_{L^gamma}
double lgamma_norm(const Grid& grid, const ScalarFieldd& rho, double gamma);

/// Relative time-integrated errors of one run.
struct ErrorReport {
  double h = 0.0;
  double grad_u = 0.0;           // L2(L2) of nabla u
  double u = 0.0;                // L2(L2) of u
  double rho_l1 = 0.0;           // L1(L1) of rho
  double rho_linf_lgamma = 0.0;  // Linf(Lgamma) of rho
};

/// Accumulates numerator and reference norms over time intervals on one
/// grid. Each interval carries the numerical and the reference level that
/// are piecewise constant on it.
class ErrorAccumulator {
 public:
  ErrorAccumulator(const Grid& grid, double gamma);

  /// grad arguments use the layout of velocity_edge_gradient.
  void add_interval(double weight, const ScalarFieldd& rho, const VectorFieldd& u, const Eigen::MatrixXd& grad_u,
                    const ScalarFieldd& rho_ref, const VectorFieldd& u_ref, const Eigen::MatrixXd& grad_u_ref);

  /// Throws std::domain_error when a reference norm vanishes.
  ErrorReport report() const;
  bool empty() const { return intervals_ == 0; }

 private:
  const Grid* grid_;
  double gamma_;
  Index intervals_ = 0;
  double grad_err_ = 0.0, grad_ref_ = 0.0;
  double u_err_ = 0.0, u_ref_ = 0.0;
  double rho_l1_err_ = 0.0, rho_l1_ref_ = 0.0;
  double rho_lg_err_ = 0.0, rho_lg_ref_ = 0.0;
};

/// Pointwise reference solution with its velocity gradient,
/// grad_u(t, x)(j, i) = d u_j / d x_i.
struct ExactSolution {
  std::function<double(double, const Point&)> rho;
  std::function<Point(double, const Point&)> u;
  std::function<Eigen::Matrix3d(double, const Point&)> grad_u;
};

/// Exact velocity gradient sampled at face centres in the
/// velocity_edge_gradient layout.
Eigen::MatrixXd sample_exact_gradient(const Grid& grid, const ExactSolution& exact, double t);

/// Streams a run against an exact solution: level k (k >= 1) is compared on
/// (t_{k-1}, t_k] with the cell projection of the exact fields at t_k.
class ExactErrorObserver {
 public:
  ExactErrorObserver(const Grid& grid, ExactSolution exact, double gamma, int refinement = 4);
  void operator()(const State& state, const StepReport& report);
  ErrorReport report() const;

 private:
  const Grid* grid_;
  ExactSolution exact_;
  int refinement_;
  ErrorAccumulator acc_;
};

/// Exact cell-mean aggregation of a fine field onto a nested coarse grid.
/// Throws std::invalid_argument unless every coarse N_i divides the fine one.
Eigen::MatrixXd restrict_to(const Grid& fine, const Grid& coarse, const Eigen::MatrixXd& values);

/// Full history of a coarse run, kept for comparison with a finer reference.
struct RunHistory {
  explicit RunHistory(Grid g) : grid(std::move(g)) {}
  Grid grid;
  std::vector<State> levels;  // levels[0] is the initial state
};

/// Compares stored coarse runs with a reference run on a nested finer grid.
/// Both runs are piecewise constant in time, level k living on
/// (t_{k-1}, t_k]; intervals are intersected exactly so the time steps of
/// the two runs need not match.
class ReferenceComparison {
 public:
  ReferenceComparison(const Grid& reference_grid, std::vector<const RunHistory*> coarse, double gamma);
  /// Observer for the reference run.
  void operator()(const State& state, const StepReport& report);
  std::vector<ErrorReport> reports() const;

 private:
  const Grid* reference_grid_;
  std::vector<const RunHistory*> coarse_;
  std::vector<ErrorAccumulator> acc_;
  std::vector<std::size_t> cursor_;
  double previous_time_ = 0.0;
};

/// log2(e_coarse / e_fine); throws std::domain_error for non-positive input.
double eoc(double e_coarse, double e_fine);

/// EOC table with the column order
/// h,e_grad_u,eoc_grad_u,e_u,eoc_u,e_rho_l1,eoc_rho_l1,e_rho_linf_lgamma,eoc_rho_linf_lgamma.
/// Rows are ordered coarse to fine; the first row leaves the EOC cells empty.
struct EocRow {
  ErrorReport errors;
  std::optional<ErrorReport> orders;
};
std::vector<EocRow> eoc_table(const std::vector<ErrorReport>& reports);
void write_eoc_csv(std::ostream& os, const std::vector<EocRow>& rows);
std::vector<EocRow> read_eoc_csv(std::istream& is);

/// Diagnostics CSV: step,t,dt,picard_iters,mass,energy,energy_slack,min_rho,max_u
void write_diagnostics_header(std::ostream& os);
void write_diagnostics_row(std::ostream& os, const StepReport& report);
std::vector<StepReport> read_diagnostics_csv(std::istream& is);

/// Running suprema of the monitored a-priori quantities along a run.
struct BoundsMonitor {
  double rho_linf_lgamma = 0.0;
  double grad_u_l2l2_sq = 0.0;
  double div_u_l2l2_sq = 0.0;
  double eps_jump_sum = 0.0;
  double kinetic_linf_l1 = 0.0;

  void add_level(const Grid& grid, const State& state, double dt, const GasModeld& model, const FluxParamsd& params);
};

}  // namespace fvns

#endif  // FVNS_DIAGNOSTICS_HPP
