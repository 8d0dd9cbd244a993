#pragma once

#include <Eigen/Sparse>
#include <array>

#include "hvp/fields.hpp"

namespace hvp {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using SpMatCol = Eigen::SparseMatrix<double>;

/// Finite-difference matrices acting on all-node vectors (flat index i + nx j).
///
/// First derivatives: central in the interior, second-order one-sided at
/// boundary nodes. Second derivatives: compact three-point differences
/// (four-point one-sided at the boundary); the mixed derivative is the
/// product of the two first-derivative stencils, which is the four-point
/// cross stencil in the interior.
class DiffOps {
 public:
  explicit DiffOps(const Grid& grid);

  const Grid& grid() const { return grid_; }
  /// d/dx_k, k in {0, 1}.
  const SpMat& d(int k) const { return d_[k]; }
  /// d^2/(dx_k dx_l); symmetric in (k, l).
  const SpMat& dd(int k, int l) const { return k == l ? dd_[k] : dxy_; }

 private:
  Grid grid_;
  std::array<SpMat, 2> d_;
  std::array<SpMat, 2> dd_;
  SpMat dxy_;
};

inline Eigen::Map<const Eigen::VectorXd> flat(const ScalarField& f) {
  return {f.data(), f.size()};
}

ScalarField apply(const SpMat& m, const ScalarField& f);

VectorField grad_h(const DiffOps& ops, const ScalarField& f);
ScalarField div_h(const DiffOps& ops, const VectorField& v);
/// (f_xx, f_xy, f_yy).
std::array<ScalarField, 3> hess_h(const DiffOps& ops, const ScalarField& f);

/// Row-major matrix whose rows pick the interior nodes out of an all-node vector.
SpMat interior_restriction(const Grid& grid);

}  // namespace hvp
