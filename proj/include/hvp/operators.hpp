#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hvp/fields.hpp"
#include "hvp/rheology.hpp"
#include "hvp/stencils.hpp"

namespace hvp {

/// Stacked unknown vector (v1, v2, h, a): velocity on interior nodes only
/// (Dirichlet nodes eliminated), thickness and concentration on all nodes.
class StackLayout {
 public:
  StackLayout() = default;
  explicit StackLayout(const Grid& grid);

  const Grid& grid() const { return grid_; }
  int interior() const { return m_; }
  int nodes() const { return n_; }
  int size() const { return 2 * m_ + 2 * n_; }
  int v_offset(int component) const { return component * m_; }
  int h_offset() const { return 2 * m_; }
  int a_offset() const { return 2 * m_ + n_; }
  /// Interior index of node p, or -1 on the boundary.
  int interior_index(int node) const { return interior_of_node_[node]; }
  int node_of_interior(int r) const { return node_of_interior_[r]; }

  Eigen::VectorXd pack(const StateField& u) const;
  /// Boundary velocity is set to zero.
  StateField unpack(const Eigen::VectorXd& x) const;

 private:
  Grid grid_;
  int m_ = 0;
  int n_ = 0;
  std::vector<int> interior_of_node_;
  std::vector<int> node_of_interior_;
};

/// Coefficients of the linearization at a frozen state u1, per node.
struct FrozenCoefficients {
  std::vector<Eigen::Matrix4d> a;  ///< a_ij^kl(eps(v1), P(h1, a1))
  ScalarField P, delta_reg, dP_dh, dP_da;
  VectorField grad_P;  ///< dP/dh grad h1 + dP/da grad a1
  ScalarField h1, a1;
};

/// Throws AssemblyError when h1 < kappa or data are non-finite.
FrozenCoefficients frozen_coefficients(const StateField& u1, const DiffOps& ops,
                                       const RheologyParams& params);

/// A^H(u1) acting on the interior velocity block (2m x 2m):
/// -sum a_ij^kl d_k d_l v_j + (1 / (2 rho h1 Delta)) sum_j (d_j P) (S eps(v))_ij.
SpMat assemble_linearized_hibler(const StateField& u1, const DiffOps& ops,
                                 const RheologyParams& params);
SpMat assemble_linearized_hibler(const FrozenCoefficients& c, const StackLayout& layout,
                                 const DiffOps& ops, const RheologyParams& params);

/// B1(u1): (h, a) on all nodes -> interior velocity rows (2m x 2N).
SpMat assemble_B1(const StateField& u1, const DiffOps& ops, const RheologyParams& params);
SpMat assemble_B1(const FrozenCoefficients& c, const StackLayout& layout, const DiffOps& ops,
                  const RheologyParams& params);

/// factor * div v: interior velocity -> all nodes (N x 2m).
SpMat assemble_scaled_div(const ScalarField& factor, const StackLayout& layout, const DiffOps& ops);

struct DiscreteOperator {
  StackLayout layout;
  SpMat matrix;  ///< the operator matrix in d/dt u + A u = f
  double omega = 0.0;
};

/// [[-A^H + omega, B1], [h1 div, omega, 0], [a1 div, 0, omega]].
DiscreteOperator assemble_operator_matrix(const StateField& u1, const DiffOps& ops,
                                          const RheologyParams& params, double omega);

/// Extract rows [r0, r0+nr) x cols [c0, c0+nc) of a row-major matrix.
SpMat block(const SpMat& m, int r0, int nr, int c0, int nc);

/// Dirichlet -Laplacian on interior nodes (positive definite).
SpMat assemble_dirichlet_laplacian(const Grid& grid);

/// Coordinate-list text: one "row col value" line per stored entry.
void dump_coo(const std::string& path, const SpMat& m);

}  // namespace hvp
