#include "hvp/stencils.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <vector>

namespace hvp {
namespace {

using Triplet = Eigen::Triplet<double>;

SpMatCol identity(int n) {
  SpMatCol m(n, n);
  m.setIdentity();
  return m;
}

SpMatCol first_derivative_1d(int n, double h) {
  std::vector<Triplet> t;
  t.emplace_back(0, 0, -3.0 / (2 * h));
  t.emplace_back(0, 1, 4.0 / (2 * h));
  t.emplace_back(0, 2, -1.0 / (2 * h));
  for (int i = 1; i < n - 1; ++i) {
    t.emplace_back(i, i - 1, -1.0 / (2 * h));
    t.emplace_back(i, i + 1, 1.0 / (2 * h));
  }
  t.emplace_back(n - 1, n - 1, 3.0 / (2 * h));
  t.emplace_back(n - 1, n - 2, -4.0 / (2 * h));
  t.emplace_back(n - 1, n - 3, 1.0 / (2 * h));
  SpMatCol m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMatCol second_derivative_1d(int n, double h) {
  const double s = 1.0 / (h * h);
  std::vector<Triplet> t;
  const double one_sided[4] = {2.0, -5.0, 4.0, -1.0};
  for (int q = 0; q < 4; ++q) {
    t.emplace_back(0, q, one_sided[q] * s);
    t.emplace_back(n - 1, n - 1 - q, one_sided[q] * s);
  }
  for (int i = 1; i < n - 1; ++i) {
    t.emplace_back(i, i - 1, s);
    t.emplace_back(i, i, -2.0 * s);
    t.emplace_back(i, i + 1, s);
  }
  SpMatCol m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

DiffOps::DiffOps(const Grid& grid) : grid_(grid) {
  const SpMatCol ix = identity(grid.nx), iy = identity(grid.ny);
  const SpMatCol d1x = first_derivative_1d(grid.nx, grid.dx);
  const SpMatCol d1y = first_derivative_1d(grid.ny, grid.dy);
  // Flat index i + nx j: the y factor is the outer Kronecker factor.
  d_[0] = SpMatCol(Eigen::kroneckerProduct(iy, d1x));
  d_[1] = SpMatCol(Eigen::kroneckerProduct(d1y, ix));
  dd_[0] = SpMatCol(Eigen::kroneckerProduct(iy, second_derivative_1d(grid.nx, grid.dx)));
  dd_[1] = SpMatCol(Eigen::kroneckerProduct(second_derivative_1d(grid.ny, grid.dy), ix));
  dxy_ = SpMatCol(Eigen::kroneckerProduct(d1y, d1x));
  for (auto* m : {&d_[0], &d_[1], &dd_[0], &dd_[1], &dxy_}) m->makeCompressed();
}

ScalarField apply(const SpMat& m, const ScalarField& f) {
  ScalarField out(f.rows(), f.cols());
  Eigen::Map<Eigen::VectorXd>(out.data(), out.size()) = m * flat(f);
  return out;
}

VectorField grad_h(const DiffOps& ops, const ScalarField& f) {
  return {apply(ops.d(0), f), apply(ops.d(1), f)};
}

ScalarField div_h(const DiffOps& ops, const VectorField& v) {
  return apply(ops.d(0), v.x) + apply(ops.d(1), v.y);
}

std::array<ScalarField, 3> hess_h(const DiffOps& ops, const ScalarField& f) {
  return {apply(ops.dd(0, 0), f), apply(ops.dd(0, 1), f), apply(ops.dd(1, 1), f)};
}

SpMat interior_restriction(const Grid& grid) {
  std::vector<Triplet> t;
  int r = 0;
  for (int j = 1; j < grid.ny - 1; ++j)
    for (int i = 1; i < grid.nx - 1; ++i) t.emplace_back(r++, grid.index(i, j), 1.0);
  SpMat m(grid.interior_size(), grid.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace hvp
