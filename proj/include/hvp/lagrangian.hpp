#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hvp/fields.hpp"
#include "hvp/stencils.hpp"

namespace hvp {

/// One 2x2 matrix per node, flat index i + nx j.
using TensorField = std::vector<Eigen::Matrix2d>;

/// Gradient convention: grad(j, n) = d w_j / d y_n, so grad X has rows for the
/// components of X and grad Y = (grad X)^{-1} has G(k, i) = dY_k / dx_i.
TensorField gradient(const DiffOps& ops, const VectorField& w);

struct FlowHealth {
  double sup_dev = 0.0;      ///< max over nodes of ||grad X - Id||_inf (max row sum)
  double min_det = 1.0;      ///< min over nodes of det grad X
  double sup_inv_dev = 0.0;  ///< max over nodes of ||Id - grad Y||_inf
  int worst_node = -1;
  bool invertible = true;  ///< sup_dev <= 1/2
};

struct FlowMap {
  Grid grid;
  double time = 0.0;
  VectorField disp;  ///< X(t, y) - y
  TensorField grad_x;
  TensorField grad_y;  ///< empty until inverted
  FlowHealth health;

  static FlowMap identity(const Grid& grid);
  bool is_identity() const;
};

/// Trapezoidal update of X and grad X with the velocity at t and t + dt.
FlowMap advance_flow_map(const FlowMap& map, const DiffOps& ops, const VectorField& v_t,
                         const VectorField& v_tp, double dt);

/// Cofactor inverse per node; throws InvertibilityLost when det < det_floor.
TensorField inverse_gradient(const TensorField& grad_x, double det_floor = 0.25, double time = 0.0);

FlowHealth invertibility_check(const FlowMap& map);

/// Check the 1/2 criterion and only then fill map.grad_y; throws
/// InvertibilityLost on failure.
void invert(FlowMap& map, double det_floor = 0.25);

enum class Direction { forward, inverse };

/// Bilinear sample of f at (x, y), clamped to the grid rectangle.
double interpolate(const Grid& g, const ScalarField& f, double x, double y, int* clamped = nullptr);

/// f composed with X (forward) or with Y (inverse, Newton from the forward map).
ScalarField compose_with_map(const ScalarField& f, const FlowMap& map, Direction direction,
                             int* clamp_events = nullptr);
VectorField compose_with_map(const VectorField& f, const FlowMap& map, Direction direction,
                             int* clamp_events = nullptr);

/// Positions Y(t, x) at every node (inverse direction only).
std::vector<Eigen::Vector2d> inverse_positions(const FlowMap& map, int* clamp_events = nullptr);

}  // namespace hvp
