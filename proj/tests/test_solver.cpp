#include "fvns/cases.hpp"
#include "fvns/diagnostics.hpp"
#include "fvns/operators.hpp"
#include "fvns/solver.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>

using namespace fvns;
using fvns::testing::FieldSampler;
using fvns::testing::max_abs;

namespace {

State uniform_state(const Grid& g, double rho, const Eigen::RowVectorXd& u) {
  State s;
  s.rho = ScalarFieldd::Constant(g.cell_count(), rho);
  s.u.resize(g.cell_count(), g.dim());
  s.u.rowwise() = u;
  return s;
}

// Momentum rows evaluated with operators only: time term, frozen-velocity
// convective flux, central pressure, Laplacian and div-div terms.
VectorFieldd momentum_residual(const Grid& g, const State& prev, const ScalarFieldd& rho, const VectorFieldd& u,
                               const VectorFieldd& u_frozen, double dt, const GasModeld& m, const FluxParamsd& p) {
  ScalarFieldd pressure(g.cell_count());
  for (Index k = 0; k < g.cell_count(); ++k) pressure(k) = m.pressure(rho(k));
  const ScalarFieldd div = div_h(g, u);
  VectorFieldd res(g.cell_count(), g.dim());
  for (int j = 0; j < g.dim(); ++j) {
    DualFieldd flux(g.cell_count(), g.dim());
    const ScalarFieldd mj = rho.cwiseProduct(u.col(j));
    for (int i = 0; i < g.dim(); ++i) {
      const FaceFieldd vn = face_average(g, u_frozen.col(i), i);
      for (Index k = 0; k < g.cell_count(); ++k) {
        const auto t = trace(g, mj, FaceId{i, k});
        flux(k, i) = diffusive_flux(t.in, t.out, vn(k), p);
      }
    }
    res.col(j) = (mj - prev.rho.cwiseProduct(prev.u.col(j))) / dt + flux_divergence(g, flux) +
                 grad_dual_axis(g, face_average(g, pressure, j), j) - m.mu * laplace_h(g, u.col(j)) -
                 (m.mu + m.lambda) * grad_dual_axis(g, face_average(g, div, j), j);
  }
  return res;
}

}  // namespace

TEST(ComputeDt, UniformStateHandValue) {
  const Grid g = build_mesh(2, {32, 32});
  const State s = uniform_state(g, 1.0, Eigen::RowVector2d::Zero());
  SolverConfig c;
  EXPECT_NEAR(compute_dt(g, s, GasModeld{}, c), 0.3 / (32.0 * std::sqrt(1.4)), 1e-15);
  EXPECT_NEAR(compute_dt(g, s, GasModeld{}, c), 0.0079233, 1e-7);
  c.dt_cap = 1e-4;
  EXPECT_EQ(compute_dt(g, s, GasModeld{}, c), 1e-4);
}

TEST(ComputeDt, LinearInCfl) {
  const Grid g = build_mesh(2, {16, 8});
  FieldSampler rng(51);
  State s;
  s.rho = rng.scalar(g, 0.5, 2.0);
  s.u = rng.vector(g);
  SolverConfig a, b;
  b.cfl = 2 * a.cfl;
  EXPECT_NEAR(compute_dt(g, s, GasModeld{}, b), 2 * compute_dt(g, s, GasModeld{}, a), 1e-16);
}

TEST(ComputeDt, RejectsNonFiniteState) {
  const Grid g = build_mesh(1, {4});
  State s = uniform_state(g, 1.0, Eigen::RowVectorXd::Zero(1));
  s.u(2, 0) = std::nan("");
  EXPECT_THROW(compute_dt(g, s, GasModeld{}, SolverConfig{}), std::domain_error);
}

TEST(SolverConfig, ListsViolations) {
  SolverConfig c;
  EXPECT_TRUE(c.violations().empty());
  c.cfl = 1.5;
  c.picard_tol = 0;
  c.linear_tol = -1;
  EXPECT_EQ(c.violations().size(), 3u);
}

TEST(SolveContinuity, RingOfTwoHandSolve) {
  const Grid g = build_mesh(1, {2});
  const ScalarFieldd rho_prev = (ScalarFieldd(2) << 1.0, 3.0).finished();
  const VectorFieldd u = VectorFieldd::Constant(2, 1, 2.0);
  const FluxParamsd p{0.6, 0.5};
  const double dt = 0.1;
  // |sigma|/|K| = 2; both faces carry flux 2 rho_in - D(rho_out - rho_in)
  const double D = std::pow(0.5, 0.6);
  const double c = 2.0 * (2.0 + 2.0 * D);
  Eigen::Matrix2d A;
  A << 1 / dt + c, -c, -c, 1 / dt + c;
  const Eigen::Vector2d expected = A.lu().solve(rho_prev / dt);
  const ScalarFieldd rho = solve_continuity(g, rho_prev, u, dt, p, SolverConfig{});
  EXPECT_NEAR(rho(0), expected(0), 1e-11);
  EXPECT_NEAR(rho(1), expected(1), 1e-11);
  EXPECT_NEAR(rho.sum(), 4.0, 1e-12);
}

TEST(SolveContinuity, PureDiffusionConservesMass) {
  const Grid g = build_mesh(2, {8, 8});
  FieldSampler rng(52);
  const ScalarFieldd rho_prev = rng.scalar(g, 0.5, 2.0);
  const ScalarFieldd rho = solve_continuity(g, rho_prev, VectorFieldd::Zero(64, 2), 0.01, FluxParamsd{0.6, 0.125},
                                            SolverConfig{});
  EXPECT_NEAR(rho.sum(), rho_prev.sum(), 1e-11 * rho_prev.sum());
  EXPECT_LT(rho.maxCoeff() - rho.minCoeff(), rho_prev.maxCoeff() - rho_prev.minCoeff());
}

TEST(SolveContinuity, ConstantDensityWithUniformVelocityIsExact) {
  const Grid g = build_mesh(2, {6, 5});
  const State s = uniform_state(g, 1.7, Eigen::RowVector2d(0.4, -0.9));
  const ScalarFieldd rho = solve_continuity(g, s.rho, s.u, 0.05, FluxParamsd{0.6, 1.0 / 5}, SolverConfig{});
  EXPECT_LE(max_abs(rho.array() - 1.7), 1e-12);
}

TEST(SolveContinuity, KeepsPositivityAndMassForRoughData) {
  const Grid g = build_mesh(2, {16, 16});
  FieldSampler rng(53);
  const ScalarFieldd rho_prev = rng.scalar(g, 1e-3, 3.0);
  const VectorFieldd u = rng.vector(g, -5.0, 5.0);
  const ScalarFieldd rho = solve_continuity(g, rho_prev, u, 0.05, FluxParamsd{0.6, 1.0 / 16}, SolverConfig{});
  EXPECT_GT(rho.minCoeff(), 0.0);
  EXPECT_NEAR(rho.sum(), rho_prev.sum(), 1e-10 * rho_prev.sum());
}

TEST(SolveMomentum, RingOfTwoHandSolve) {
  const Grid g = build_mesh(1, {2});
  const FluxParamsd p{0.6, 0.5};
  const GasModeld m;
  const double dt = 0.1;
  State prev;
  prev.rho = (ScalarFieldd(2) << 1.0, 3.0).finished();
  prev.u = VectorFieldd::Constant(2, 1, 2.0);
  const ScalarFieldd rho = solve_continuity(g, prev.rho, prev.u, dt, p, SolverConfig{});
  const VectorFieldd u = solve_momentum(g, prev, rho, prev.u, dt, m, Forcing{}, p, SolverConfig{});

  // On two cells both face averages coincide, so pressure and div-div cancel;
  // row K: (rho_K u_K - rho_prev,K 2)/dt + 2[(2+2D)(rho_K u_K - rho_L u_L) + 4 mu (u_K - u_L)] = 0.
  const double D = std::pow(0.5, 0.6);
  const double c = 2.0 * (2.0 + 2.0 * D);
  const double v = 8.0 * m.mu;
  Eigen::Matrix2d A;
  A << rho(0) / dt + c * rho(0) + v, -c * rho(1) - v, -c * rho(0) - v, rho(1) / dt + c * rho(1) + v;
  const Eigen::Vector2d b(2.0 * 1.0 / dt, 2.0 * 3.0 / dt);
  const Eigen::Vector2d expected = A.lu().solve(b);
  EXPECT_NEAR(u(0, 0), expected(0), 1e-10);
  EXPECT_NEAR(u(1, 0), expected(1), 1e-10);
}

TEST(SolveMomentum, UniformStateIsFixed) {
  const Grid g = build_mesh(2, {5, 4});
  const State s = uniform_state(g, 1.3, Eigen::RowVector2d(0.7, -0.2));
  const VectorFieldd u =
      solve_momentum(g, s, s.rho, s.u, 0.02, GasModeld{}, Forcing{}, FluxParamsd{0.6, 0.25}, SolverConfig{});
  EXPECT_LE(max_abs(u - s.u), 1e-12);
}

TEST(SolveMomentum, RestStaysAtRest) {
  const Grid g = build_mesh(2, {4, 4});
  const State s = uniform_state(g, 2.0, Eigen::RowVector2d::Zero());
  const VectorFieldd u =
      solve_momentum(g, s, s.rho, s.u, 0.02, GasModeld{}, Forcing{}, FluxParamsd{0.6, 0.25}, SolverConfig{});
  EXPECT_LE(max_abs(u), 1e-14);
}

class MomentumAgainstOperators : public ::testing::TestWithParam<std::vector<Index>> {};

TEST_P(MomentumAgainstOperators, SolutionAnnihilatesIndependentResidual) {
  const auto& n = GetParam();
  const Grid g(static_cast<int>(n.size()), n);
  FieldSampler rng(54);
  GasModeld m;
  m.mu = 0.05;
  m.lambda = 0.3;
  const FluxParamsd p{0.6, g.h()};
  State prev;
  prev.rho = rng.scalar(g, 0.5, 2.0);
  prev.u = rng.vector(g);
  const VectorFieldd u_frozen = prev.u + 0.1 * rng.vector(g);
  const ScalarFieldd rho = rng.scalar(g, 0.5, 2.0);
  const double dt = 0.01;
  const VectorFieldd u = solve_momentum(g, prev, rho, u_frozen, dt, m, Forcing{}, p, SolverConfig{});
  const VectorFieldd res = momentum_residual(g, prev, rho, u, u_frozen, dt, m, p);
  const double scale = max_abs(prev.rho.asDiagonal() * prev.u) / dt;
  EXPECT_LE(max_abs(res), 1e-9 * scale);
}

INSTANTIATE_TEST_SUITE_P(Meshes, MomentumAgainstOperators,
                         ::testing::Values(std::vector<Index>{6}, std::vector<Index>{6, 5},
                                           std::vector<Index>{4, 3, 5}));

TEST(PicardStep, UniformStateConvergesImmediately) {
  const Grid g = build_mesh(2, {8, 8});
  const State s = uniform_state(g, 1.0, Eigen::RowVector2d(0.3, 0.1));
  const auto [next, report] = picard_step(g, s, 0.01, GasModeld{}, Forcing{}, SolverConfig{}, FluxParamsd{0.6, 0.125});
  EXPECT_EQ(report.picard_iterations, 1);
  EXPECT_LE(max_abs(next.rho - s.rho), 1e-12);
  EXPECT_LE(max_abs(next.u - s.u), 1e-12);
  EXPECT_DOUBLE_EQ(next.time, 0.01);
}

TEST(PicardStep, ManufacturedFirstStepSolvesNonlinearScheme) {
  const Grid g = build_mesh(2, {32, 32});
  const BenchmarkCase c = manufactured_case();
  const State s = initial_state(g, c);
  const SolverConfig config;
  const FluxParamsd p{c.epsilon, g.h()};
  const double dt = compute_dt(g, s, c.model, config);
  const auto [next, report] = picard_step(g, s, dt, c.model, c.forcing, config, p);
  EXPECT_LE(report.picard_iterations, 50);
  EXPECT_LE(report.picard_residual, config.picard_tol);
  EXPECT_LE(report.nonlinear_residual, 1e-8);
  EXPECT_NEAR(total_mass(g, next), total_mass(g, s), 1e-12);
}

TEST(PicardStep, ReportsFailureWhenIterationCapIsTooSmall) {
  const Grid g = build_mesh(2, {16, 16});
  const BenchmarkCase c = gresho_case();
  const State s = initial_state(g, c);
  SolverConfig config;
  config.picard_max_iter = 1;
  EXPECT_THROW(picard_step(g, s, 0.01, c.model, c.forcing, config, FluxParamsd{0.6, g.h()}), StepFailure);
}

TEST(SchemeResidual, VanishesForUniformState) {
  const Grid g = build_mesh(2, {4, 4});
  State prev = uniform_state(g, 1.0, Eigen::RowVector2d(1.0, -1.0));
  State next = prev;
  next.time = 0.1;
  const auto r = scheme_residual(g, prev, next, GasModeld{}, Forcing{}, FluxParamsd{0.6, 0.25});
  EXPECT_LE(r.max_scaled(0.1), 1e-14);
}

TEST(Run, ZeroFinalTimeReturnsInitialState) {
  const Grid g = build_mesh(2, {8, 8});
  const State s = initial_state(g, gresho_case());
  const RunResult r = run(g, s, 0.0, GasModeld{}, Forcing{}, SolverConfig{}, FluxParamsd{0.6, g.h()});
  ASSERT_EQ(r.reports.size(), 1u);
  EXPECT_EQ(r.final_state.rho, s.rho);
  EXPECT_EQ(r.final_state.u, s.u);
}

TEST(Run, LandsExactlyOnFinalTime) {
  const Grid g = build_mesh(2, {16, 16});
  const State s = initial_state(g, gresho_case());
  const RunResult r = run(g, s, 0.0123, GasModeld{}, Forcing{}, SolverConfig{}, FluxParamsd{0.6, g.h()});
  EXPECT_EQ(r.final_state.time, 0.0123);
  EXPECT_EQ(r.reports.back().time, 0.0123);
  double sum = 0.0;
  for (std::size_t k = 1; k < r.reports.size(); ++k) sum += r.reports[k].dt;
  EXPECT_NEAR(sum, 0.0123, 1e-15);
}

TEST(Run, ConservesMassKeepsPositivityAndDissipatesEnergy) {
  const Grid g = build_mesh(2, {16, 16});
  const State s = initial_state(g, gresho_case());
  const GasModeld m;
  const RunResult r = run(g, s, 0.05, m, Forcing{}, SolverConfig{}, FluxParamsd{0.6, g.h()});
  const double e0 = r.reports.front().energy;
  for (std::size_t k = 1; k < r.reports.size(); ++k) {
    EXPECT_NEAR(r.reports[k].mass, r.reports[0].mass, 1e-10 * r.reports[0].mass);
    EXPECT_GT(r.reports[k].min_rho, 0.0);
    EXPECT_LE(r.reports[k].energy_slack, 1e-8 * e0);
    EXPECT_LE(r.reports[k].energy, r.reports[k - 1].energy + 1e-8 * e0 * r.reports[k].dt);
  }
}

TEST(Run, ConstantStateIsSteady) {
  const Grid g = build_mesh(2, {16, 16});
  const State s = uniform_state(g, 1.2, Eigen::RowVector2d(0.5, 0.25));
  SolverConfig config;
  const double dt = compute_dt(g, s, GasModeld{}, config);
  const RunResult r = run(g, s, 20 * dt, GasModeld{}, Forcing{}, config, FluxParamsd{0.6, g.h()});
  EXPECT_LE(max_abs(r.final_state.rho - s.rho), 1e-9);
  EXPECT_LE(max_abs(r.final_state.u - s.u), 1e-9);
}

TEST(Run, ObserverSeesEveryLevel) {
  const Grid g = build_mesh(2, {8, 8});
  const State s = initial_state(g, gresho_case());
  std::vector<Index> steps;
  const RunResult r = run(g, s, 0.02, GasModeld{}, Forcing{}, SolverConfig{}, FluxParamsd{0.6, g.h()},
                          [&](const State&, const StepReport& rep) { steps.push_back(rep.step); });
  ASSERT_EQ(steps.size(), r.reports.size());
  for (std::size_t k = 0; k < steps.size(); ++k) EXPECT_EQ(steps[k], static_cast<Index>(k));
}

TEST(Run, IsBitwiseReproducible) {
  const Grid g = build_mesh(2, {16, 16});
  const State s = initial_state(g, gresho_case());
  const auto a = run(g, s, 0.01, GasModeld{}, Forcing{}, SolverConfig{}, FluxParamsd{0.6, g.h()});
  const auto b = run(g, s, 0.01, GasModeld{}, Forcing{}, SolverConfig{}, FluxParamsd{0.6, g.h()});
  EXPECT_EQ(a.final_state.rho, b.final_state.rho);
  EXPECT_EQ(a.final_state.u, b.final_state.u);
}

TEST(Run, RejectsInvalidInputs) {
  const Grid g = build_mesh(2, {8, 8});
  const State s = initial_state(g, gresho_case());
  EXPECT_THROW(run(g, s, 0.1, GasModeld{}, Forcing{}, SolverConfig{}, FluxParamsd{1.5, g.h()}),
               std::invalid_argument);
  SolverConfig bad;
  bad.cfl = 0;
  EXPECT_THROW(run(g, s, 0.1, GasModeld{}, Forcing{}, bad, FluxParamsd{0.6, g.h()}), std::invalid_argument);
}
