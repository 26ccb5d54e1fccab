#ifndef FVNS_GRID_HPP
#define FVNS_GRID_HPP

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <vector>

namespace fvns {

using Index = Eigen::Index;
using Point = Eigen::Vector3d;

/// Lexicographic linear index of a primary cell (last axis fastest).
struct CellId {
  Index value = 0;
  friend bool operator==(CellId, CellId) = default;
};

/// Face orthogonal to e_axis separating `owner` from owner + e_axis.
/// The face normal points from the owner (in side) to the neighbour
/// (out side).
struct FaceId {
  int axis = 0;
  Index owner = 0;
  friend bool operator==(FaceId, FaceId) = default;
};

/// A face seen from one of its two cells. `sign` is +1 when the cell is
/// the in side (outward normal +e_axis) and -1 when it is the out side.
struct CellFace {
  FaceId face;
  int sign = 1;
};

struct FaceCells {
  CellId in;
  CellId out;
};

/// Dual cell D_sigma: the two half cells adjacent to a face.
struct DualCell {
  FaceId face;
  CellId half_in;
  CellId half_out;
  double measure = 0.0;
};

/// Uniform periodic grid of the unit torus in 1, 2 or 3 dimensions.
///
/// Cells are numbered lexicographically in (i, j, k), k fastest. Faces are numbered axis-major: the global
/// face number of FaceId{i, K} is i * cell_count() + K. Every face has
/// exactly two cells, so each axis carries cell_count() faces.
///
/// Immutable after construction.
class Grid {
 public:
  Grid(int dim, std::vector<Index> cells_per_axis);

  int dim() const { return dim_; }
  Index cells(int axis) const { return n_[axis]; }
  const std::array<Index, 3>& cells_per_axis() const { return n_; }
  Index cell_count() const { return cell_count_; }
  Index face_count(int /*axis*/) const { return cell_count_; }
  Index face_count() const { return dim_ * cell_count_; }

  /// h_i = 1 / N_i
  double spacing(int axis) const { return spacing_[axis]; }
  /// h = max_i h_i
  double h() const { return h_; }
  /// eta_h = max_i h / h_i
  double regularity() const;

  double cell_volume() const { return volume_; }
  double face_area(int axis) const { return volume_ / spacing_[axis]; }
  /// Periodic distance between the two cell centres across an axis-i face.
  double face_distance(int axis) const { return spacing_[axis]; }
  double dual_volume() const { return volume_; }

  std::array<Index, 3> multi_index(CellId cell) const;
  CellId cell_at(const std::array<Index, 3>& idx) const;
  /// Cell reached by `offset` steps along `axis`, wrapping around the torus.
  CellId shift(CellId cell, int axis, Index offset) const;
  Index stride(int axis) const { return stride_[axis]; }

  Point cell_center(CellId cell) const;
  Point face_center(FaceId face) const;

  Index face_number(FaceId face) const { return face.axis * cell_count_ + face.owner; }
  FaceId face_from_number(Index number) const;

  FaceCells cells_of(FaceId face) const;
  /// The 2 * dim faces of a cell, ordered (axis 0 right, axis 0 left, axis 1 right, ...).
  std::vector<CellFace> faces_of(CellId cell) const;
  /// The right (+e_axis) and left (-e_axis) face of a cell on one axis.
  FaceId right_face(CellId cell, int axis) const { return {axis, cell.value}; }
  FaceId left_face(CellId cell, int axis) const { return {axis, shift(cell, axis, -1).value}; }

  /// Cell on the other side of `face`. Throws std::invalid_argument when the
  /// face is not incident to `cell`.
  CellId neighbor_across(CellId cell, FaceId face) const;

  DualCell dual_cell(FaceId face) const;

  bool operator==(const Grid& other) const { return dim_ == other.dim_ && n_ == other.n_; }

 private:
  int dim_;
  std::array<Index, 3> n_{1, 1, 1};
  std::array<Index, 3> stride_{0, 0, 0};
  std::array<double, 3> spacing_{1.0, 1.0, 1.0};
  double h_ = 0.0;
  double volume_ = 0.0;
  Index cell_count_ = 0;
};

/// Factory mirroring the constructor; validates dim in {1,2,3} and N_i >= 2.
Grid build_mesh(int dim, const std::vector<Index>& cells_per_axis);

}  // namespace fvns

#endif  // FVNS_GRID_HPP
