#include "fvns/fields.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fvns {

namespace {

constexpr const char* kIndexNames[] = {"i", "j", "k"};
constexpr const char* kCoordNames[] = {"x", "y", "z"};

std::string snapshot_header(int dim) {
  std::string header;
  for (int i = 0; i < dim; ++i) header += std::string(kIndexNames[i]) + ",";
  for (int i = 0; i < dim; ++i) header += std::string(kCoordNames[i]) + ",";
  header += "rho";
  for (int j = 0; j < dim; ++j) header += ",u" + std::to_string(j + 1);
  return header;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> parts;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  return parts;
}

double parse_real(const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw std::runtime_error("snapshot: bad number '" + text + "'");
  return value;
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("format_real: conversion failed");
  return std::string(buf, ptr);
}

void write_snapshot(std::ostream& os, const Grid& grid, const ScalarFieldd& rho, const VectorFieldd& u) {
  if (rho.size() != grid.cell_count() || u.rows() != grid.cell_count() || u.cols() != grid.dim()) {
    throw std::invalid_argument("snapshot: field sizes do not match the grid");
  }
  os << snapshot_header(grid.dim()) << '\n';
  for (Index k = 0; k < grid.cell_count(); ++k) {
    const auto idx = grid.multi_index({k});
    const Point x = grid.cell_center({k});
    for (int i = 0; i < grid.dim(); ++i) os << idx[i] << ',';
    for (int i = 0; i < grid.dim(); ++i) os << format_real(x[i]) << ',';
    os << format_real(rho(k));
    for (int j = 0; j < grid.dim(); ++j) os << ',' << format_real(u(k, j));
    os << '\n';
  }
}

void write_snapshot(const std::string& path, const Grid& grid, const ScalarFieldd& rho, const VectorFieldd& u) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path);
  write_snapshot(os, grid, rho, u);
}

Snapshot read_snapshot(std::istream& is, const Grid& grid) {
  const int d = grid.dim();
  std::string line;
  if (!std::getline(is, line) || line != snapshot_header(d)) {
    throw std::runtime_error("snapshot: unexpected header '" + line + "'");
  }
  Snapshot snap{ScalarFieldd::Zero(grid.cell_count()), VectorFieldd::Zero(grid.cell_count(), d)};
  std::vector<bool> seen(grid.cell_count(), false);
  Index rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto parts = split_csv(line);
    if (static_cast<int>(parts.size()) != 3 * d + 1) throw std::runtime_error("snapshot: bad row '" + line + "'");
    std::array<Index, 3> idx{0, 0, 0};
    for (int i = 0; i < d; ++i) {
      idx[i] = std::stoll(parts[i]);
      if (idx[i] < 0 || idx[i] >= grid.cells(i)) throw std::runtime_error("snapshot: index out of range");
    }
    const Index k = grid.cell_at(idx).value;
    if (seen[k]) throw std::runtime_error("snapshot: duplicate cell row");
    seen[k] = true;
    snap.rho(k) = parse_real(parts[2 * d]);
    for (int j = 0; j < d; ++j) snap.u(k, j) = parse_real(parts[2 * d + 1 + j]);
    ++rows;
  }
  if (rows != grid.cell_count()) throw std::runtime_error("snapshot: expected one row per cell");
  return snap;
}

Snapshot read_snapshot(const std::string& path, const Grid& grid) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path);
  return read_snapshot(is, grid);
}

}  // namespace fvns
