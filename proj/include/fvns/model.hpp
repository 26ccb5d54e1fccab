#ifndef FVNS_MODEL_HPP
#define FVNS_MODEL_HPP

#include "fvns/grid.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fvns {

/// Isentropic gas p = a rho^gamma with shear viscosity mu and bulk
/// coefficient lambda.
template <typename Scalar = double>
struct GasModel {
  Scalar a = Scalar(1);
  Scalar gamma = Scalar(1.4);
  Scalar mu = Scalar(0.01);
  Scalar lambda = Scalar(0.01);

  /// Every violated invariant, one message each; empty when valid.
  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (!(a > 0)) out.push_back("model.a must be > 0");
    if (!(gamma > 1)) out.push_back("model.gamma must be > 1");
    if (!(mu > 0)) out.push_back("model.mu must be > 0");
    if (!(lambda >= -mu)) out.push_back("model.lambda must be >= -model.mu");
    return out;
  }

  void validate() const {
    const auto v = violations();
    if (!v.empty()) throw std::invalid_argument(v.front());
  }

  /// The convergence theory covers 1 < gamma < 2 only.
  bool in_convergence_range() const { return gamma > 1 && gamma < 2; }

  Scalar pressure(Scalar rho) const {
    check_density(rho);
    return a * std::pow(rho, gamma);
  }

  /// H(rho) = p(rho) / (gamma - 1)
  Scalar pressure_potential(Scalar rho) const {
    check_density(rho);
    return a * std::pow(rho, gamma) / (gamma - 1);
  }

  /// H'(rho) = a gamma rho^(gamma-1) / (gamma - 1)
  Scalar pressure_potential_derivative(Scalar rho) const {
    check_density(rho);
    return a * gamma * std::pow(rho, gamma - 1) / (gamma - 1);
  }

  /// c = sqrt(gamma p / rho)
  Scalar sound_speed(Scalar rho) const {
    if (!(rho > 0)) throw std::domain_error("sound_speed: density must be positive");
    return std::sqrt(gamma * a * std::pow(rho, gamma - 1));
  }

 private:
  static void check_density(Scalar rho) {
    if (!(rho >= 0)) throw std::domain_error("gas model: negative density");
  }
};

using GasModeld = GasModel<double>;

/// Momentum source f(t, x); only the first dim components are used.
struct Forcing {
  std::function<Point(double, const Point&)> function;

  bool is_zero() const { return !function; }
  Point operator()(double t, const Point& x) const { return function ? function(t, x) : Point::Zero(); }
};

}  // namespace fvns

#endif  // FVNS_MODEL_HPP
