#ifndef FVNS_FIELDS_HPP
#define FVNS_FIELDS_HPP

#include "fvns/grid.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <iosfwd>
#include <string>

namespace fvns {

/// One value per primary cell (the space Q_h), in cell-index order.
template <typename Scalar>
using ScalarField = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// cell_count x dim; column j holds velocity component j.
template <typename Scalar>
using VectorField = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// One value per face of a single axis (equivalently per dual cell of D_i),
/// indexed by the owner cell of the face.
template <typename Scalar>
using FaceField = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// cell_count x dim; column i is the FaceField of axis i (the space W_h).
template <typename Scalar>
using DualField = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using ScalarFieldd = ScalarField<double>;
using VectorFieldd = VectorField<double>;
using FaceFieldd = FaceField<double>;
using DualFieldd = DualField<double>;

/// The two one-sided values of a cellwise constant field on a face.
template <typename Scalar>
struct FaceTrace {
  Scalar in;
  Scalar out;

  Scalar average() const { return (in + out) / Scalar(2); }
  Scalar jump() const { return out - in; }

  static FaceTrace from_average_jump(Scalar average, Scalar jump) {
    return {average - jump / Scalar(2), average + jump / Scalar(2)};
  }
};

/// v_in is the owner value, v_out the value in owner + e_axis.
template <typename Derived>
FaceTrace<typename Derived::Scalar> trace(const Grid& grid, const Eigen::MatrixBase<Derived>& field,
                                          FaceId face) {
  const auto cells = grid.cells_of(face);
  return {field(cells.in.value), field(cells.out.value)};
}

/// Per-face averages of a cell field along one axis.
template <typename Derived>
FaceField<typename Derived::Scalar> face_average(const Grid& grid, const Eigen::MatrixBase<Derived>& field,
                                                 int axis) {
  FaceField<typename Derived::Scalar> avg(grid.cell_count());
  for (Index k = 0; k < grid.cell_count(); ++k) {
    avg(k) = (field(k) + field(grid.shift({k}, axis, 1).value)) / 2;
  }
  return avg;
}

/// Per-face jumps (out - in) of a cell field along one axis.
template <typename Derived>
FaceField<typename Derived::Scalar> face_jump(const Grid& grid, const Eigen::MatrixBase<Derived>& field, int axis) {
  FaceField<typename Derived::Scalar> jmp(grid.cell_count());
  for (Index k = 0; k < grid.cell_count(); ++k) {
    jmp(k) = field(grid.shift({k}, axis, 1).value) - field(k);
  }
  return jmp;
}

namespace detail {

inline double wrap_unit(double x) {
  x -= std::floor(x);
  return x >= 1.0 ? 0.0 : x;
}

/// Calls visit(point) at the midpoint sub-samples of the box with lower
/// corner `lo` and edge lengths `len`, `refinement` samples per axis.
template <typename Visit>
void for_each_midpoint(int dim, const Point& lo, const Point& len, int refinement, Visit&& visit) {
  std::array<int, 3> counts{1, 1, 1};
  for (int i = 0; i < dim; ++i) counts[i] = refinement;
  for (int a = 0; a < counts[0]; ++a)
    for (int b = 0; b < counts[1]; ++b)
      for (int c = 0; c < counts[2]; ++c) {
        const std::array<int, 3> sub{a, b, c};
        Point x = Point::Zero();
        for (int i = 0; i < dim; ++i) {
          x[i] = wrap_unit(lo[i] + (sub[i] + 0.5) * len[i] / refinement);
        }
        visit(x);
      }
}

}  // namespace detail

/// Cell means of f (Pi_T) by a tensor midpoint rule with `refinement`
/// samples per axis. Exact for cellwise constant and cellwise linear f.
template <typename Scalar = double, typename Function>
ScalarField<Scalar> project_cell(const Grid& grid, Function&& f, int refinement = 4) {
  ScalarField<Scalar> out(grid.cell_count());
  const int samples = static_cast<int>(std::pow(refinement, grid.dim()));
  Point len = Point::Zero();
  for (int i = 0; i < grid.dim(); ++i) len[i] = grid.spacing(i);
  for (Index k = 0; k < grid.cell_count(); ++k) {
    Point lo = grid.cell_center({k}) - 0.5 * len;
    Scalar sum(0);
    detail::for_each_midpoint(grid.dim(), lo, len, refinement, [&](const Point& x) { sum += f(x); });
    out(k) = sum / Scalar(samples);
  }
  return out;
}

/// Cell means of each component of a vector function f(x) -> Point.
template <typename Scalar = double, typename Function>
VectorField<Scalar> project_cell_vector(const Grid& grid, Function&& f, int refinement = 4) {
  VectorField<Scalar> out(grid.cell_count(), grid.dim());
  for (int j = 0; j < grid.dim(); ++j) {
    out.col(j) = project_cell<Scalar>(grid, [&](const Point& x) { return Scalar(f(x)[j]); }, refinement);
  }
  return out;
}

/// Means of a scalar f over the dual cells of one axis (Pi_D^(i)).
template <typename Scalar = double, typename Function>
FaceField<Scalar> project_dual_axis(const Grid& grid, int axis, Function&& f, int refinement = 4) {
  FaceField<Scalar> out(grid.cell_count());
  const int samples = static_cast<int>(std::pow(refinement, grid.dim()));
  Point len = Point::Zero();
  for (int i = 0; i < grid.dim(); ++i) len[i] = grid.spacing(i);
  for (Index k = 0; k < grid.cell_count(); ++k) {
    // D_sigma spans [x_K, x_L] along the axis and the cell width across it.
    Point lo = grid.face_center({axis, k}) - 0.5 * len;
    Scalar sum(0);
    detail::for_each_midpoint(grid.dim(), lo, len, refinement, [&](const Point& x) { sum += f(x); });
    out(k) = sum / Scalar(samples);
  }
  return out;
}

/// Pi_D applied to a vector function: column i is the dual mean of f_i on axis i.
template <typename Scalar = double, typename Function>
DualField<Scalar> project_dual(const Grid& grid, Function&& f, int refinement = 4) {
  DualField<Scalar> out(grid.cell_count(), grid.dim());
  for (int i = 0; i < grid.dim(); ++i) {
    out.col(i) = project_dual_axis<Scalar>(grid, i, [&](const Point& x) { return Scalar(f(x)[i]); }, refinement);
  }
  return out;
}

/// Cellwise density and velocity as stored in a snapshot file.
struct Snapshot {
  ScalarFieldd rho;
  VectorFieldd u;
};

/// CSV snapshot: header `i,j[,k],x[,y[,z]],rho,u1[,u2[,u3]]`, one row per
/// cell in cell-index order, reals in shortest round-trip form.
void write_snapshot(std::ostream& os, const Grid& grid, const ScalarFieldd& rho, const VectorFieldd& u);
void write_snapshot(const std::string& path, const Grid& grid, const ScalarFieldd& rho, const VectorFieldd& u);
Snapshot read_snapshot(std::istream& is, const Grid& grid);
Snapshot read_snapshot(const std::string& path, const Grid& grid);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);

}  // namespace fvns

#endif  // FVNS_FIELDS_HPP
