#pragma once

#include "hvp/fields.hpp"
#include "hvp/lagrangian.hpp"
#include "hvp/operators.hpp"
#include "hvp/stencils.hpp"

namespace hvp {

/// Per-node symmetric 2x2 field.
using TransformedStrain = TensorField;

/// eps~_jl = 1/2 sum_n (G(n, j) d_n v_l + G(n, l) d_n v_j), G = grad Y.
TransformedStrain transformed_strain(const DiffOps& ops, const VectorField& v,
                                     const TensorField& grad_y);

/// d/dy_m of eps~ by the four-term product-rule expansion (m = 0, 1).
std::array<TensorField, 2> transformed_strain_derivative(const DiffOps& ops, const VectorField& v,
                                                         const TensorField& grad_y);

/// d/dy_m of each entry of a tensor field with the first-derivative stencils.
std::array<TensorField, 2> tensor_gradient(const DiffOps& ops, const TensorField& t);

/// Transformed Hibler operator: (1/(rho h)) div S_delta written in Lagrangian
/// coordinates, i.e. -sum a_ij^kl G(m, k) d_m eps~_jl plus the ice-strength
/// gradient term with d_x P = G^T (dP/dh grad h + dP/da grad a).
/// Requires flow.grad_y; boundary entries are zero.
VectorField apply_transformed_hibler(const StateField& u, const FlowMap& flow, const DiffOps& ops,
                                     const RheologyParams& params);

/// (1/(rho h)) div S_delta by direct differencing of the nodal stress.
VectorField hibler_divergence_form(const StateField& u, const DiffOps& ops,
                                   const RheologyParams& params);

/// B~(u)(h, a) = grad_x P / (2 rho h) with grad_x = G^T grad_y.
VectorField apply_transformed_B(const StateField& u, const FlowMap& flow, const DiffOps& ops,
                                const RheologyParams& params);

/// sum_jk G(k, j) d_k v_j at all nodes.
ScalarField transformed_div(const DiffOps& ops, const VectorField& v, const TensorField& grad_y);

/// Blocks of the operator matrix frozen at u0, reused by every right-hand side.
struct FrozenSystem {
  StateField u0;
  StackLayout layout;
  FrozenCoefficients coeffs;
  SpMat hibler;  ///< A^H(u0)
  SpMat b1;      ///< B1(u0)
  SpMat h0_div;
  SpMat a0_div;
  DiscreteOperator op;  ///< full operator matrix with the shift omega
  double omega = 0.0;
};

FrozenSystem build_frozen_system(const StateField& u0, const DiffOps& ops,
                                 const RheologyParams& params, double omega);

struct RhsFields {
  VectorField F1;
  ScalarField F2;
  ScalarField F3;
};

/// F1, F2, F3 at the state u~ (flow.grad_y must be present).
/// Throws BlowupSignal when u~ is not in V.
RhsFields assemble_rhs(const StateField& u_tilde, const FlowMap& flow, const FrozenSystem& sys,
                       const DiffOps& ops, const RheologyParams& params,
                       const ForcingFields& forcing, double t);

/// Same with u~ = u_hat + reference.
RhsFields assemble_rhs(const StateField& u_hat, const StateField& reference, const FlowMap& flow,
                       const FrozenSystem& sys, const DiffOps& ops, const RheologyParams& params,
                       const ForcingFields& forcing, double t);

/// Wind plus ocean drag (tau_atm + tau_ocn(v)) / (rho h) at physical positions.
VectorField drag_acceleration(const StateField& u, const std::vector<Eigen::Vector2d>& positions,
                              const RheologyParams& params, const ForcingFields& forcing, double t);

/// Positions X(t, y) clamped to the domain (node positions for the identity map).
std::vector<Eigen::Vector2d> mapped_positions(const FlowMap& flow);

/// Residual of the transformed system at the backward-Euler step n -> n+1:
/// (u_{n+1} - u_n)/dt - N(u_{n+1}), interior velocity rows only.
StateField transformed_residual(const StateField& u_n, const StateField& u_np1,
                                const FlowMap& flow_np1, const DiffOps& ops,
                                const RheologyParams& params, const ForcingFields& forcing,
                                double t_np1, double dt);

}  // namespace hvp
