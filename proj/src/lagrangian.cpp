#include "hvp/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hvp/errors.hpp"

namespace hvp {
namespace {

double row_sum_norm(const Eigen::Matrix2d& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

Eigen::Matrix2d cofactor_inverse(const Eigen::Matrix2d& m, double det) {
  Eigen::Matrix2d inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return inv / det;
}

}  // namespace

TensorField gradient(const DiffOps& ops, const VectorField& w) {
  const ScalarField w1x = apply(ops.d(0), w.x), w1y = apply(ops.d(1), w.x);
  const ScalarField w2x = apply(ops.d(0), w.y), w2y = apply(ops.d(1), w.y);
  TensorField out(static_cast<std::size_t>(w.x.size()));
  for (Eigen::Index p = 0; p < w.x.size(); ++p) {
    out[p] << w1x(p), w1y(p), w2x(p), w2y(p);
  }
  return out;
}

FlowMap FlowMap::identity(const Grid& grid) {
  FlowMap m;
  m.grid = grid;
  m.disp = VectorField::zero(grid);
  m.grad_x.assign(grid.size(), Eigen::Matrix2d::Identity());
  m.grad_y = m.grad_x;
  return m;
}

bool FlowMap::is_identity() const {
  if ((disp.x != 0.0).any() || (disp.y != 0.0).any()) return false;
  return std::all_of(grad_x.begin(), grad_x.end(),
                     [](const Eigen::Matrix2d& m) { return m == Eigen::Matrix2d::Identity(); });
}

FlowMap advance_flow_map(const FlowMap& map, const DiffOps& ops, const VectorField& v_t,
                         const VectorField& v_tp, double dt) {
  FlowMap out;
  out.grid = map.grid;
  out.time = map.time + dt;
  const VectorField mean{0.5 * dt * (v_t.x + v_tp.x), 0.5 * dt * (v_t.y + v_tp.y)};
  out.disp = {map.disp.x + mean.x, map.disp.y + mean.y};
  const TensorField inc = gradient(ops, mean);
  out.grad_x.resize(map.grad_x.size());
  for (std::size_t p = 0; p < inc.size(); ++p) out.grad_x[p] = map.grad_x[p] + inc[p];
  out.health = invertibility_check(out);
  return out;
}

TensorField inverse_gradient(const TensorField& grad_x, double det_floor, double time) {
  TensorField out(grad_x.size());
  for (std::size_t p = 0; p < grad_x.size(); ++p) {
    const double det = grad_x[p].determinant();
    if (!(det >= det_floor)) {
      throw InvertibilityLost("det grad X = " + std::to_string(det) + " below floor at node " +
                                  std::to_string(p),
                              static_cast<int>(p), time);
    }
    out[p] = cofactor_inverse(grad_x[p], det);
  }
  return out;
}

FlowHealth invertibility_check(const FlowMap& map) {
  FlowHealth h;
  h.min_det = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < map.grad_x.size(); ++p) {
    const Eigen::Matrix2d& m = map.grad_x[p];
    const double dev = row_sum_norm(m - Eigen::Matrix2d::Identity());
    if (p == 0 || dev > h.sup_dev) {
      h.sup_dev = dev;
      h.worst_node = static_cast<int>(p);
    }
    const double det = m.determinant();
    h.min_det = std::min(h.min_det, det);
    const double inv_dev = det > 0.0 ? row_sum_norm(Eigen::Matrix2d::Identity() - cofactor_inverse(m, det))
                                     : std::numeric_limits<double>::infinity();
    h.sup_inv_dev = std::max(h.sup_inv_dev, inv_dev);
  }
  h.invertible = h.sup_dev <= 0.5;
  return h;
}

void invert(FlowMap& map, double det_floor) {
  map.health = invertibility_check(map);
  if (!map.health.invertible) {
    throw InvertibilityLost("sup |grad X - Id| = " + std::to_string(map.health.sup_dev) +
                                " exceeds 1/2 at node " + std::to_string(map.health.worst_node),
                            map.health.worst_node, map.time);
  }
  map.grad_y = inverse_gradient(map.grad_x, det_floor, map.time);
}

double interpolate(const Grid& g, const ScalarField& f, double x, double y, int* clamped) {
  const double xmax = g.x0 + g.lx(), ymax = g.y0 + g.ly();
  const double xc = std::clamp(x, g.x0, xmax), yc = std::clamp(y, g.y0, ymax);
  if (clamped && (xc != x || yc != y)) ++*clamped;
  const double sx = (xc - g.x0) / g.dx, sy = (yc - g.y0) / g.dy;
  const int i = std::min(static_cast<int>(std::floor(sx)), g.nx - 2);
  const int j = std::min(static_cast<int>(std::floor(sy)), g.ny - 2);
  const double wx = sx - i, wy = sy - j;
  return (1 - wx) * (1 - wy) * f(i, j) + wx * (1 - wy) * f(i + 1, j) + (1 - wx) * wy * f(i, j + 1) +
         wx * wy * f(i + 1, j + 1);
}

std::vector<Eigen::Vector2d> inverse_positions(const FlowMap& map, int* clamp_events) {
  const FlowHealth health = invertibility_check(map);
  if (!health.invertible) {
    throw InvertibilityLost("inverse composition requested on an unhealthy flow map",
                            health.worst_node, map.time);
  }
  const Grid& g = map.grid;
  ScalarField gx[2][2];
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      gx[r][c].resize(g.nx, g.ny);
      for (int p = 0; p < g.size(); ++p) gx[r][c](p) = map.grad_x[p](r, c);
    }
  const double tol = 1e-10 * std::min(g.dx, g.dy);
  std::vector<Eigen::Vector2d> out(g.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Eigen::Vector2d x(g.x(i), g.y(j));
      Eigen::Vector2d y = x - map.disp.at(i, j);
      for (int it = 0; it < 3; ++it) {
        const Eigen::Vector2d xy(y.x() + interpolate(g, map.disp.x, y.x(), y.y()),
                                 y.y() + interpolate(g, map.disp.y, y.x(), y.y()));
        const Eigen::Vector2d r = xy - x;
        if (r.norm() <= tol) break;
        Eigen::Matrix2d jac;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) jac(a, b) = interpolate(g, gx[a][b], y.x(), y.y());
        y -= jac.inverse() * r;
      }
      const double xmax = g.x0 + g.lx(), ymax = g.y0 + g.ly();
      const Eigen::Vector2d yc(std::clamp(y.x(), g.x0, xmax), std::clamp(y.y(), g.y0, ymax));
      if (clamp_events && yc != y) ++*clamp_events;
      out[g.index(i, j)] = yc;
    }
  return out;
}

ScalarField compose_with_map(const ScalarField& f, const FlowMap& map, Direction direction,
                             int* clamp_events) {
  const Grid& g = map.grid;
  ScalarField out(g.nx, g.ny);
  if (direction == Direction::forward) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        out(i, j) = interpolate(g, f, g.x(i) + map.disp.x(i, j), g.y(j) + map.disp.y(i, j),
                                clamp_events);
      }
    return out;
  }
  const auto pos = inverse_positions(map, clamp_events);
  for (int p = 0; p < g.size(); ++p) out(p) = interpolate(g, f, pos[p].x(), pos[p].y());
  return out;
}

VectorField compose_with_map(const VectorField& f, const FlowMap& map, Direction direction,
                             int* clamp_events) {
  if (direction == Direction::forward) {
    return {compose_with_map(f.x, map, direction, clamp_events),
            compose_with_map(f.y, map, direction, nullptr)};
  }
  const Grid& g = map.grid;
  const auto pos = inverse_positions(map, clamp_events);
  VectorField out = VectorField::zero(g);
  for (int p = 0; p < g.size(); ++p) {
    out.x(p) = interpolate(g, f.x, pos[p].x(), pos[p].y());
    out.y(p) = interpolate(g, f.y, pos[p].x(), pos[p].y());
  }
  return out;
}

}  // namespace hvp
