#include "fvns/grid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fvns {

Grid::Grid(int dim, std::vector<Index> cells_per_axis) : dim_(dim) {
  if (dim < 1 || dim > 3) {
    throw std::invalid_argument("grid: dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (static_cast<int>(cells_per_axis.size()) != dim) {
    throw std::invalid_argument("grid: expected " + std::to_string(dim) + " cell counts, got " +
                                std::to_string(cells_per_axis.size()));
  }
  cell_count_ = 1;
  volume_ = 1.0;
  for (int i = 0; i < dim; ++i) {
    if (cells_per_axis[i] < 2) {
      throw std::invalid_argument("grid: axis " + std::to_string(i) +
                                  " needs at least 2 cells, got " +
                                  std::to_string(cells_per_axis[i]));
    }
    n_[i] = cells_per_axis[i];
    spacing_[i] = 1.0 / static_cast<double>(n_[i]);
    cell_count_ *= n_[i];
    volume_ *= spacing_[i];
    h_ = std::max(h_, spacing_[i]);
  }
  // lexicographic: the last axis runs fastest
  Index stride = 1;
  for (int i = dim - 1; i >= 0; --i) {
    stride_[i] = stride;
    stride *= n_[i];
  }
}

double Grid::regularity() const {
  double eta = 0.0;
  for (int i = 0; i < dim_; ++i) eta = std::max(eta, h_ / spacing_[i]);
  return eta;
}

std::array<Index, 3> Grid::multi_index(CellId cell) const {
  std::array<Index, 3> idx{0, 0, 0};
  Index rest = cell.value;
  for (int i = dim_ - 1; i >= 0; --i) {
    idx[i] = rest % n_[i];
    rest /= n_[i];
  }
  return idx;
}

CellId Grid::cell_at(const std::array<Index, 3>& idx) const {
  Index lin = 0;
  for (int i = 0; i < dim_; ++i) {
    Index k = idx[i] % n_[i];
    if (k < 0) k += n_[i];
    lin += k * stride_[i];
  }
  return {lin};
}

CellId Grid::shift(CellId cell, int axis, Index offset) const {
  const Index n = n_[axis];
  const Index k = (cell.value / stride_[axis]) % n;
  Index target = (k + offset) % n;
  if (target < 0) target += n;
  return {cell.value + (target - k) * stride_[axis]};
}

Point Grid::cell_center(CellId cell) const {
  const auto idx = multi_index(cell);
  Point x = Point::Zero();
  for (int i = 0; i < dim_; ++i) x[i] = (static_cast<double>(idx[i]) + 0.5) * spacing_[i];
  return x;
}

Point Grid::face_center(FaceId face) const {
  Point x = cell_center({face.owner});
  x[face.axis] += 0.5 * spacing_[face.axis];
  return x;
}

FaceId Grid::face_from_number(Index number) const {
  if (number < 0 || number >= face_count()) throw std::out_of_range("grid: face number out of range");
  return {static_cast<int>(number / cell_count_), number % cell_count_};
}

FaceCells Grid::cells_of(FaceId face) const {
  return {{face.owner}, shift({face.owner}, face.axis, 1)};
}

std::vector<CellFace> Grid::faces_of(CellId cell) const {
  std::vector<CellFace> faces;
  faces.reserve(2 * dim_);
  for (int i = 0; i < dim_; ++i) {
    faces.push_back({right_face(cell, i), +1});
    faces.push_back({left_face(cell, i), -1});
  }
  return faces;
}

CellId Grid::neighbor_across(CellId cell, FaceId face) const {
  if (face.axis < 0 || face.axis >= dim_ || face.owner < 0 || face.owner >= cell_count_) {
    throw std::invalid_argument("grid: face does not exist");
  }
  const auto [in, out] = cells_of(face);
  if (cell == in) return out;
  if (cell == out) return in;
  throw std::invalid_argument("grid: face (axis " + std::to_string(face.axis) + ", owner " +
                              std::to_string(face.owner) + ") is not incident to cell " +
                              std::to_string(cell.value));
}

DualCell Grid::dual_cell(FaceId face) const {
  const auto [in, out] = cells_of(face);
  return {face, in, out, volume_};
}

Grid build_mesh(int dim, const std::vector<Index>& cells_per_axis) { return Grid(dim, cells_per_axis); }

}  // namespace fvns
