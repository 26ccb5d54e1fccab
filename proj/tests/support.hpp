#ifndef FVNS_TESTS_SUPPORT_HPP
#define FVNS_TESTS_SUPPORT_HPP

#include "fvns/fields.hpp"
#include "fvns/grid.hpp"

#include <random>

namespace fvns::testing {

/// Deterministic random fields for identity checks.
class FieldSampler {
 public:
  explicit FieldSampler(unsigned seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  ScalarFieldd scalar(const Grid& grid, double lo = -1.0, double hi = 1.0) {
    ScalarFieldd out(grid.cell_count());
    for (auto& v : out) v = uniform(lo, hi);
    return out;
  }

  VectorFieldd vector(const Grid& grid, double lo = -1.0, double hi = 1.0) {
    VectorFieldd out(grid.cell_count(), grid.dim());
    for (Index j = 0; j < out.cols(); ++j) out.col(j) = scalar(grid, lo, hi);
    return out;
  }

  DualFieldd dual(const Grid& grid, double lo = -1.0, double hi = 1.0) { return vector(grid, lo, hi); }

 private:
  std::mt19937_64 engine_;
};

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace fvns::testing

#endif  // FVNS_TESTS_SUPPORT_HPP
