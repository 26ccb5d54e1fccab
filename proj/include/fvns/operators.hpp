#ifndef FVNS_OPERATORS_HPP
#define FVNS_OPERATORS_HPP

#include "fvns/fields.hpp"
#include "fvns/grid.hpp"

#include <Eigen/Core>

namespace fvns {

// Discrete calculus on the periodic grid. Integrals of Q_h data are
// sum_K |K| (.)_K, of W_h data sum_sigma |D_sigma| (.)_sigma, and face
// integrals of face-constant data |sigma| (.)_sigma.

template <typename Derived>
typename Derived::Scalar integrate_cells(const Grid& grid, const Eigen::MatrixBase<Derived>& values) {
  return grid.cell_volume() * values.sum();
}

template <typename Derived>
typename Derived::Scalar integrate_dual(const Grid& grid, const Eigen::MatrixBase<Derived>& values) {
  return grid.dual_volume() * values.sum();
}

/// Discrete divergence by the face-sum formula
/// (div_h u)_K = 1/|K| sum_{sigma in E(K)} |sigma| avg(u).n
template <typename Derived>
ScalarField<typename Derived::Scalar> div_h(const Grid& grid, const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  ScalarField<Scalar> acc = ScalarField<Scalar>::Zero(grid.cell_count());
  for (int i = 0; i < grid.dim(); ++i) {
    const Scalar area = grid.face_area(i);
    for (Index k = 0; k < grid.cell_count(); ++k) {
      const Index l = grid.shift({k}, i, 1).value;
      const Scalar flux = area * (u(k, i) + u(l, i)) / Scalar(2);
      acc(k) += flux;
      acc(l) -= flux;
    }
  }
  return acc / Scalar(grid.cell_volume());
}

/// Edge gradient nabla_E: column i holds (r_L - r_K) / d_sigma on the
/// faces of axis i.
template <typename Derived>
DualField<typename Derived::Scalar> grad_edge(const Grid& grid, const Eigen::MatrixBase<Derived>& r) {
  using Scalar = typename Derived::Scalar;
  DualField<Scalar> q(grid.cell_count(), grid.dim());
  for (int i = 0; i < grid.dim(); ++i) {
    const Scalar inv_d = Scalar(1) / Scalar(grid.face_distance(i));
    for (Index k = 0; k < grid.cell_count(); ++k) {
      q(k, i) = (r(grid.shift({k}, i, 1).value) - r(k)) * inv_d;
    }
  }
  return q;
}

/// One axis of the dual-to-primary difference:
/// (q|sigma' - q|sigma) / h_i with sigma' the right and sigma the left face.
template <typename Derived>
ScalarField<typename Derived::Scalar> grad_dual_axis(const Grid& grid, const Eigen::MatrixBase<Derived>& q,
                                                     int axis) {
  using Scalar = typename Derived::Scalar;
  ScalarField<Scalar> out(grid.cell_count());
  const Scalar inv_h = Scalar(1) / Scalar(grid.spacing(axis));
  for (Index k = 0; k < grid.cell_count(); ++k) {
    out(k) = (q(k) - q(grid.shift({k}, axis, -1).value)) * inv_h;
  }
  return out;
}

/// nabla_T: column i is grad_dual_axis applied to column i of q.
template <typename Derived>
VectorField<typename Derived::Scalar> grad_dual(const Grid& grid, const Eigen::MatrixBase<Derived>& q) {
  VectorField<typename Derived::Scalar> out(grid.cell_count(), grid.dim());
  for (int i = 0; i < grid.dim(); ++i) out.col(i) = grad_dual_axis(grid, q.col(i), i);
  return out;
}

/// div_h written as sum_i of the dual difference of face averages.
template <typename Derived>
ScalarField<typename Derived::Scalar> div_h_dual_form(const Grid& grid, const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  ScalarField<Scalar> out = ScalarField<Scalar>::Zero(grid.cell_count());
  for (int i = 0; i < grid.dim(); ++i) out += grad_dual_axis(grid, face_average(grid, u.col(i), i), i);
  return out;
}

/// Delta_h^(i) r by the face-sum formula restricted to the faces of one axis.
template <typename Derived>
ScalarField<typename Derived::Scalar> laplace_axis(const Grid& grid, const Eigen::MatrixBase<Derived>& r, int axis) {
  using Scalar = typename Derived::Scalar;
  ScalarField<Scalar> acc = ScalarField<Scalar>::Zero(grid.cell_count());
  const Scalar coeff = Scalar(grid.face_area(axis) / grid.face_distance(axis));
  for (Index k = 0; k < grid.cell_count(); ++k) {
    const Index l = grid.shift({k}, axis, 1).value;
    const Scalar jump = r(l) - r(k);
    acc(k) += coeff * jump;
    acc(l) -= coeff * jump;
  }
  return acc / Scalar(grid.cell_volume());
}

/// (Delta_h r)_K = 1/|K| sum_{sigma in E(K)} |sigma| [[r]] / d_sigma,
/// jumps taken outward from K.
template <typename Derived>
ScalarField<typename Derived::Scalar> laplace_h(const Grid& grid, const Eigen::MatrixBase<Derived>& r) {
  using Scalar = typename Derived::Scalar;
  ScalarField<Scalar> out = ScalarField<Scalar>::Zero(grid.cell_count());
  for (int i = 0; i < grid.dim(); ++i) out += laplace_axis(grid, r, i);
  return out;
}

/// Scratch buffers for repeated operator evaluation inside time loops.
/// Buffer contents carry no meaning between calls.
template <typename Scalar>
class OperatorWorkspace {
 public:
  explicit OperatorWorkspace(const Grid& grid)
      : grid_(&grid), cell_(grid.cell_count()), dual_(grid.cell_count(), grid.dim()) {}

  const Grid& grid() const { return *grid_; }

  /// div_h u into the internal cell buffer.
  const ScalarField<Scalar>& divergence(const VectorField<Scalar>& u) {
    cell_.setZero();
    for (int i = 0; i < grid_->dim(); ++i) {
      const Scalar area = grid_->face_area(i);
      for (Index k = 0; k < grid_->cell_count(); ++k) {
        const Index l = grid_->shift({k}, i, 1).value;
        const Scalar flux = area * (u(k, i) + u(l, i)) / Scalar(2);
        cell_(k) += flux;
        cell_(l) -= flux;
      }
    }
    cell_ /= Scalar(grid_->cell_volume());
    return cell_;
  }

  /// nabla_E r into the internal dual buffer.
  const DualField<Scalar>& edge_gradient(const Eigen::Ref<const ScalarField<Scalar>>& r) {
    for (int i = 0; i < grid_->dim(); ++i) {
      const Scalar inv_d = Scalar(1) / Scalar(grid_->face_distance(i));
      for (Index k = 0; k < grid_->cell_count(); ++k) {
        dual_(k, i) = (r(grid_->shift({k}, i, 1).value) - r(k)) * inv_d;
      }
    }
    return dual_;
  }

 private:
  const Grid* grid_;
  ScalarField<Scalar> cell_;
  DualField<Scalar> dual_;
};

}  // namespace fvns

#endif  // FVNS_OPERATORS_HPP
