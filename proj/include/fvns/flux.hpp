#ifndef FVNS_FLUX_HPP
#define FVNS_FLUX_HPP

#include "fvns/fields.hpp"
#include "fvns/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fvns {

/// Artificial-diffusion exponent epsilon and mesh size h of F_h.
template <typename Scalar = double>
struct FluxParams {
  Scalar epsilon = Scalar(0.6);
  Scalar h = Scalar(0.5);

  /// Upper bound min{1, 2(gamma - 1)} on epsilon.
  static Scalar epsilon_bound(Scalar gamma) { return std::min(Scalar(1), Scalar(2) * (gamma - Scalar(1))); }

  std::vector<std::string> violations(Scalar gamma) const {
    std::vector<std::string> out;
    const Scalar bound = epsilon_bound(gamma);
    if (!(epsilon > 0 && epsilon < bound)) {
      std::ostringstream msg;
      msg << "flux.epsilon = " << epsilon << " must satisfy 0 < epsilon < min{1, 2(gamma-1)} = " << bound;
      out.push_back(msg.str());
    }
    if (!(h > 0 && h < 1)) out.push_back("flux: mesh size h must lie in (0, 1)");
    return out;
  }

  void validate(Scalar gamma) const {
    const auto v = violations(gamma);
    if (!v.empty()) throw std::invalid_argument(v.front());
  }

  /// h^epsilon
  Scalar diffusion() const { return std::pow(h, epsilon); }
};

using FluxParamsd = FluxParams<double>;

/// Up[r, v] = r^up (avg(v).n); the in side is upwind when avg(v).n >= 0.
template <typename Scalar>
Scalar upwind(Scalar r_in, Scalar r_out, Scalar vbar_n) {
  return (vbar_n >= Scalar(0) ? r_in : r_out) * vbar_n;
}

/// avg(r) vbar_n - |vbar_n| [[r]] / 2
template <typename Scalar>
Scalar upwind_central_form(Scalar r_in, Scalar r_out, Scalar vbar_n) {
  return (r_in + r_out) / Scalar(2) * vbar_n - std::abs(vbar_n) * (r_out - r_in) / Scalar(2);
}

/// r_in [vbar_n]^+ + r_out [vbar_n]^-
template <typename Scalar>
Scalar upwind_split_form(Scalar r_in, Scalar r_out, Scalar vbar_n) {
  const Scalar plus = (vbar_n + std::abs(vbar_n)) / Scalar(2);
  const Scalar minus = (vbar_n - std::abs(vbar_n)) / Scalar(2);
  return r_in * plus + r_out * minus;
}

/// F_h(r, v) = Up[r, v] - h^epsilon [[r]]
template <typename Scalar>
Scalar diffusive_flux(Scalar r_in, Scalar r_out, Scalar vbar_n, const FluxParams<Scalar>& params) {
  return upwind(r_in, r_out, vbar_n) - params.diffusion() * (r_out - r_in);
}

namespace detail {

template <typename Scalar, typename RDerived, typename UDerived>
DualField<Scalar> face_flux(const Grid& grid, const Eigen::MatrixBase<RDerived>& r,
                            const Eigen::MatrixBase<UDerived>& u, Scalar diffusion) {
  DualField<Scalar> flux(grid.cell_count(), grid.dim());
  for (int i = 0; i < grid.dim(); ++i) {
    for (Index k = 0; k < grid.cell_count(); ++k) {
      const Index l = grid.shift({k}, i, 1).value;
      const Scalar vn = (u(k, i) + u(l, i)) / Scalar(2);
      flux(k, i) = upwind<Scalar>(r(k), r(l), vn) - diffusion * (r(l) - r(k));
    }
  }
  return flux;
}

}  // namespace detail

/// F_h(rho, u) on every face, oriented from the owner cell to its +e_i
/// neighbour; column i holds the faces of axis i. Each face value is the
/// single flux consumed by both adjacent cells.
template <typename RDerived, typename UDerived>
DualField<typename RDerived::Scalar> mass_flux(const Grid& grid, const Eigen::MatrixBase<RDerived>& rho,
                                               const Eigen::MatrixBase<UDerived>& u,
                                               const FluxParams<typename RDerived::Scalar>& params) {
  return detail::face_flux<typename RDerived::Scalar>(grid, rho, u, params.diffusion());
}

/// Bold F_h(rho u, u): element j is the face flux of rho u_j, laid out as
/// in mass_flux.
template <typename RDerived, typename UDerived>
std::vector<DualField<typename RDerived::Scalar>> momentum_flux(const Grid& grid,
                                                                const Eigen::MatrixBase<RDerived>& rho,
                                                                const Eigen::MatrixBase<UDerived>& u,
                                                                const FluxParams<typename RDerived::Scalar>& params) {
  using Scalar = typename RDerived::Scalar;
  std::vector<DualField<Scalar>> out;
  out.reserve(grid.dim());
  for (int j = 0; j < grid.dim(); ++j) {
    const ScalarField<Scalar> m = rho.cwiseProduct(u.col(j));
    out.push_back(detail::face_flux<Scalar>(grid, m, u, params.diffusion()));
  }
  return out;
}

/// Net outflow per cell, sum_{sigma in E(K)} |sigma|/|K| F, of a face flux
/// stored in the owner orientation.
template <typename Derived>
ScalarField<typename Derived::Scalar> flux_divergence(const Grid& grid, const Eigen::MatrixBase<Derived>& flux) {
  using Scalar = typename Derived::Scalar;
  ScalarField<Scalar> acc = ScalarField<Scalar>::Zero(grid.cell_count());
  for (int i = 0; i < grid.dim(); ++i) {
    const Scalar area = grid.face_area(i);
    for (Index k = 0; k < grid.cell_count(); ++k) {
      const Index l = grid.shift({k}, i, 1).value;
      acc(k) += area * flux(k, i);
      acc(l) -= area * flux(k, i);
    }
  }
  return acc / Scalar(grid.cell_volume());
}

}  // namespace fvns

#endif  // FVNS_FLUX_HPP
