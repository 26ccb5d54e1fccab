#include "fvns/cases.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fvns {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double manufactured_rho(const Point& x) { return 2.0 + std::cos(kTwoPi * (x[0] + x[1])); }

// Both velocity components are +-sin(2 pi t) g(x + y) with g = 1 / rho.
Point manufactured_u(double t, const Point& x) {
  const double v = std::sin(kTwoPi * t) / manufactured_rho(x);
  return {v, -v, 0.0};
}

Eigen::Matrix3d manufactured_grad_u(double t, const Point& x) {
  const double s = x[0] + x[1];
  const double rho = manufactured_rho(x);
  const double drho = -kTwoPi * std::sin(kTwoPi * s);
  const double dg = -drho / (rho * rho);
  const double amp = std::sin(kTwoPi * t) * dg;
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  g(0, 0) = amp;
  g(0, 1) = amp;
  g(1, 0) = -amp;
  g(1, 1) = -amp;
  return g;
}

}  // namespace

Point manufactured_forcing(const GasModeld& model, double t, const Point& x) {
  // rho u = sin(2 pi t)(1,-1) is uniform and div u = 0, so convection and the
  // div-div term vanish; what remains is d_t(rho u) + grad p - mu Lap u.
  const double s = x[0] + x[1];
  const double rho = manufactured_rho(x);
  const double drho = -kTwoPi * std::sin(kTwoPi * s);
  const double d2rho = -kTwoPi * kTwoPi * std::cos(kTwoPi * s);
  const double d2g = -d2rho / (rho * rho) + 2.0 * drho * drho / (rho * rho * rho);

  const double dt_momentum = kTwoPi * std::cos(kTwoPi * t);
  const double dp = model.a * model.gamma * std::pow(rho, model.gamma - 1.0) * drho;
  const double lap = 2.0 * std::sin(kTwoPi * t) * d2g;

  return {dt_momentum + dp - model.mu * lap, -dt_momentum + dp + model.mu * lap, 0.0};
}

BenchmarkCase manufactured_case(const GasModeld& model) {
  BenchmarkCase c;
  c.name = "manufactured";
  c.dim = 2;
  c.model = model;
  c.rho0 = manufactured_rho;
  c.u0 = [](const Point& x) { return manufactured_u(0.0, x); };
  c.forcing.function = [model](double t, const Point& x) { return manufactured_forcing(model, t, x); };
  c.exact = ExactSolution{[](double, const Point& x) { return manufactured_rho(x); }, manufactured_u,
                          manufactured_grad_u};
  c.final_time = 0.1;
  return c;
}

double gresho_speed(double gamma, double r) {
  const double scale = std::sqrt(gamma);
  if (r < 0.5 * kGreshoRadius) return scale * 2.0 * r / kGreshoRadius;
  if (r < kGreshoRadius) return scale * 2.0 * (1.0 - r / kGreshoRadius);
  return 0.0;
}

BenchmarkCase gresho_case(const GasModeld& model) {
  BenchmarkCase c;
  c.name = "gresho";
  c.dim = 2;
  c.model = model;
  c.rho0 = [](const Point&) { return 1.0; };
  const double gamma = model.gamma;
  c.u0 = [gamma](const Point& x) -> Point {
    const double dx = x[0] - 0.5;
    const double dy = x[1] - 0.5;
    const double r = std::hypot(dx, dy);
    if (r == 0.0) return Point::Zero();
    const double factor = gresho_speed(gamma, r) / r;
    return {dy * factor, -dx * factor, 0.0};
  };
  c.final_time = 0.2;
  return c;
}

BenchmarkCase make_case(const std::string& name, const GasModeld& model) {
  if (name == "manufactured" || name == "experiment1") return manufactured_case(model);
  if (name == "gresho" || name == "experiment2") return gresho_case(model);
  std::string known;
  for (const auto& n : case_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown case '" + name + "' (known: " + known + ")");
}

std::vector<std::string> case_names() { return {"manufactured", "experiment1", "gresho", "experiment2"}; }

State initial_state(const Grid& grid, const BenchmarkCase& benchmark, int refinement) {
  if (grid.dim() != benchmark.dim) {
    throw std::invalid_argument("case '" + benchmark.name + "' needs a " + std::to_string(benchmark.dim) +
                                "-dimensional grid");
  }
  State s;
  s.time = 0.0;
  s.rho = project_cell(grid, benchmark.rho0, refinement);
  s.u = project_cell_vector(grid, benchmark.u0, refinement);
  return s;
}

}  // namespace fvns
