#ifndef FVNS_CASES_HPP
#define FVNS_CASES_HPP

#include "fvns/diagnostics.hpp"
#include "fvns/grid.hpp"
#include "fvns/model.hpp"
#include "fvns/solver.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fvns {

/// Initial data, forcing and (optionally) the exact solution of a benchmark.
struct BenchmarkCase {
  std::string name;
  int dim = 2;
  std::function<double(const Point&)> rho0;
  std::function<Point(const Point&)> u0;
  Forcing forcing;
  std::optional<ExactSolution> exact;
  double final_time = 0.0;
  GasModeld model;
  double epsilon = 0.6;
};

/// rho = 2 + cos(2 pi (x + y)), u = sin(2 pi t) (1, -1) / rho with the
/// momentum source that makes the pair an exact solution for `model`.
BenchmarkCase manufactured_case(const GasModeld& model = {});

/// Closed-form momentum source of the manufactured solution.
Point manufactured_forcing(const GasModeld& model, double t, const Point& x);

inline constexpr double kGreshoRadius = 0.2;

/// Azimuthal speed of the Gresho vortex at distance r from (0.5, 0.5).
double gresho_speed(double gamma, double r);

/// Stationary vortex of radius 0.2 centred at (0.5, 0.5), rho = 1.
BenchmarkCase gresho_case(const GasModeld& model = {});

/// "manufactured" / "experiment1" or "gresho" / "experiment2".
BenchmarkCase make_case(const std::string& name, const GasModeld& model = {});
std::vector<std::string> case_names();

/// (Pi_T rho0, Pi_T u0) at t = 0.
State initial_state(const Grid& grid, const BenchmarkCase& benchmark, int refinement = 4);

}  // namespace fvns

#endif  // FVNS_CASES_HPP
