#include "hvp/eulerian.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>

#include "hvp/linear_solver.hpp"
#include "hvp/operators.hpp"
#include "hvp/rheology.hpp"
#include "hvp/thermo.hpp"

namespace hvp {
namespace {

using Triplet = Eigen::Triplet<double>;

ScalarField node_weights(const Grid& g) {
  ScalarField w(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double wx = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
      const double wy = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
      w(i, j) = wx * wy * g.dx * g.dy;
    }
  return w;
}

Eigen::Vector2d weighted_sum(const ScalarField& w, const ScalarField& m, const VectorField& acc) {
  return {(w * m * acc.x).sum(), (w * m * acc.y).sum()};
}

double upwind_derivative(const ScalarField& f, int i, int j, int di, int dj, double speed, double h) {
  if (speed > 0.0) return (f(i, j) - f(i - di, j - dj)) / h;
  return (f(i + di, j + dj) - f(i, j)) / h;
}

/// Explicit upwind step for v and conservative dual-cell upwind step for h, a.
void advect(StateField& u, double dt) {
  const Grid& g = u.grid;
  const StateField old = u;
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      const double vx = old.v.x(i, j), vy = old.v.y(i, j);
      for (auto [dst, src] : {std::pair{&u.v.x, &old.v.x}, std::pair{&u.v.y, &old.v.y}}) {
        const double adv = vx * upwind_derivative(*src, i, j, 1, 0, vx, g.dx) +
                           vy * upwind_derivative(*src, i, j, 0, 1, vy, g.dy);
        (*dst)(i, j) -= dt * adv;
      }
    }
  for (auto [dst, src] : {std::pair{&u.h, &old.h}, std::pair{&u.a, &old.a}}) {
    // x faces
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i + 1 < g.nx; ++i) {
        const double uf = 0.5 * (old.v.x(i, j) + old.v.x(i + 1, j));
        const double flux = uf * (uf > 0.0 ? (*src)(i, j) : (*src)(i + 1, j));
        const double wl = (i == 0) ? 0.5 * g.dx : g.dx;
        const double wr = (i + 1 == g.nx - 1) ? 0.5 * g.dx : g.dx;
        (*dst)(i, j) -= dt * flux / wl;
        (*dst)(i + 1, j) += dt * flux / wr;
      }
    // y faces
    for (int j = 0; j + 1 < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double uf = 0.5 * (old.v.y(i, j) + old.v.y(i, j + 1));
        const double flux = uf * (uf > 0.0 ? (*src)(i, j) : (*src)(i, j + 1));
        const double wl = (j == 0) ? 0.5 * g.dy : g.dy;
        const double wr = (j + 1 == g.ny - 1) ? 0.5 * g.dy : g.dy;
        (*dst)(i, j) -= dt * flux / wl;
        (*dst)(i, j + 1) += dt * flux / wr;
      }
  }
}

/// Matrix of v -> (1/(rho h)) div(2 eta eps + (zeta - eta) tr(eps) Id) on
/// interior unknowns, compact in the pure second derivatives.
SpMat viscous_operator(const StateField& u, const RheologyParams& params, const DiffOps& ops,
                       const StackLayout& layout) {
  const Grid& g = u.grid;
  ScalarField A(g.nx, g.ny), B(g.nx, g.ny), E(g.nx, g.ny);
  const VectorField g1 = grad_h(ops, u.v.x), g2 = grad_h(ops, u.v.y);
  for (int p = 0; p < g.size(); ++p) {
    Eigen::Matrix2d eps;
    eps << g1.x(p), 0.5 * (g1.y(p) + g2.x(p)), 0.5 * (g1.y(p) + g2.x(p)), g2.y(p);
    const auto vis = viscosities(eps, ice_strength(u.h(p), u.a(p), params), params.delta, params.e);
    A(p) = vis.zeta + vis.eta;
    B(p) = vis.zeta - vis.eta;
    E(p) = vis.eta;
  }
  const int m = layout.interior();
  std::vector<Triplet> t;
  auto put = [&](int row, int comp, int i, int j, double val) {
    const int r = layout.interior_index(g.index(i, j));
    if (r >= 0) t.emplace_back(row, comp * m + r, val);
  };
  const double ix2 = 1.0 / (g.dx * g.dx), iy2 = 1.0 / (g.dy * g.dy), ixy = 1.0 / (4 * g.dx * g.dy);
  for (int r = 0; r < m; ++r) {
    const int p = layout.node_of_interior(r);
    const int i = p % g.nx, j = p / g.nx;
    const double inv_m = 1.0 / (params.rho_ice * u.h(p));
    // Component c: d_c(A d_c v_c) + d_o(E d_o v_c) + d_c(B d_o v_o) + d_o(E d_c v_o), o = 1 - c.
    for (int c = 0; c < 2; ++c) {
      const int o = 1 - c;
      const int row = c * m + r;
      const ScalarField& Kc = A;  // along own direction
      const ScalarField& Ko = E;  // along the other direction
      const int dic[2] = {c == 0 ? 1 : 0, c == 0 ? 0 : 1};
      const int dio[2] = {dic[1], dic[0]};
      const double sc = c == 0 ? ix2 : iy2, so = c == 0 ? iy2 : ix2;
      for (auto [K, d, s] : {std::tuple{&Kc, dic, sc}, std::tuple{&Ko, dio, so}}) {
        const double kp = 0.5 * ((*K)(i, j) + (*K)(i + d[0], j + d[1]));
        const double km = 0.5 * ((*K)(i, j) + (*K)(i - d[0], j - d[1]));
        put(row, c, i + d[0], j + d[1], inv_m * s * kp);
        put(row, c, i, j, -inv_m * s * (kp + km));
        put(row, c, i - d[0], j - d[1], inv_m * s * km);
      }
      // Mixed terms: d_c(B d_o v_o) + d_o(E d_c v_o) with central differences.
      for (int sc1 : {1, -1})
        for (int sc2 : {1, -1}) {
          const int ip = i + sc1 * dic[0] + sc2 * dio[0];
          const int jp = j + sc1 * dic[1] + sc2 * dio[1];
          const double bterm = B(i + sc1 * dic[0], j + sc1 * dic[1]);
          const double eterm = E(i + sc2 * dio[0], j + sc2 * dio[1]);
          put(row, o, ip, jp, inv_m * ixy * sc1 * sc2 * (bterm + eterm));
        }
    }
  }
  SpMat out(2 * m, 2 * m);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace

Eigen::Vector2d total_momentum(const StateField& u, const RheologyParams& params) {
  const ScalarField w = node_weights(u.grid);
  return weighted_sum(w, params.rho_ice * u.h, u.v);
}

EulerianStep step_eulerian(const StateField& u_n, const RheologyParams& params,
                           const ForcingFields& forcing, double dt, double t, const DiffOps& ops,
                           const EulerianOptions& opts) {
  const Grid& g = u_n.grid;
  const double vmax = std::max(u_n.v.x.abs().maxCoeff(), u_n.v.y.abs().maxCoeff());
  const double hmin = std::min(g.dx, g.dy);
  EulerianStep out;
  out.cfl = vmax * dt / hmin;
  if (opts.advection && out.cfl > opts.cfl_max) {
    const double suggested = 0.9 * opts.cfl_max * hmin / vmax;
    throw CflViolation("CFL number " + std::to_string(out.cfl) + " exceeds " +
                           std::to_string(opts.cfl_max) + "; suggested dt " +
                           std::to_string(suggested),
                       out.cfl, suggested);
  }
  const ScalarField w = node_weights(g);
  MomentumBudget& b = out.budget;
  b.before = total_momentum(u_n, params);

  StateField u = u_n;
  if (opts.advection) {
    advect(u, dt);
    b.advection = total_momentum(u, params) - b.before;
  }
  const ScalarField mass = params.rho_ice * u.h;

  if (opts.stress) {
    const StackLayout layout(g);
    const SpMat L = viscous_operator(u, params, ops, layout);
    // Pressure part -grad P / (2 rho h), explicit at the advected state.
    ScalarField P(g.nx, g.ny);
    for (int p = 0; p < g.size(); ++p) P(p) = ice_strength(u.h(p), u.a(p), params);
    const VectorField gP = grad_h(ops, P);
    const int m = layout.interior();
    Eigen::VectorXd v(2 * m), press(2 * m);
    for (int r = 0; r < m; ++r) {
      const int p = layout.node_of_interior(r);
      v(r) = u.v.x(p);
      v(m + r) = u.v.y(p);
      press(r) = -gP.x(p) / (2.0 * mass(p));
      press(m + r) = -gP.y(p) / (2.0 * mass(p));
    }
    SpMatCol lhs(2 * m, 2 * m);
    lhs.setIdentity();
    lhs -= dt * SpMatCol(L);
    Eigen::SparseLU<SpMatCol> lu(lhs);
    if (lu.info() != Eigen::Success) throw SolverError("stress step factorization failed");
    const Eigen::VectorXd rhs = v + dt * press;
    Eigen::VectorXd vn = lu.solve(rhs);
    const Eigen::VectorXd res = rhs - lhs * vn;
    if (res.norm() > 1e-10 * std::max(rhs.norm(), 1e-300) && rhs.norm() > 0.0) {
      vn += lu.solve(res);
    }
    const Eigen::VectorXd acc = L * vn + press;
    VectorField accf = VectorField::zero(g);
    for (int r = 0; r < m; ++r) {
      const int p = layout.node_of_interior(r);
      u.v.x(p) = vn(r);
      u.v.y(p) = vn(m + r);
      accf.x(p) = acc(r);
      accf.y(p) = acc(m + r);
    }
    b.stress = dt * weighted_sum(w, mass, accf);
  }

  // Explicit terms, all evaluated at the state after the stress step.
  VectorField cor = VectorField::zero(g), drag = VectorField::zero(g), tilt = VectorField::zero(g);
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      const double x = g.x(i), y = g.y(j);
      const Eigen::Vector2d v = u.v.at(i, j);
      if (opts.coriolis) cor.set(i, j, params.c_cor * Eigen::Vector2d(v.y(), -v.x()));
      if (opts.height) tilt.set(i, j, -params.g * forcing.grad_H(t, x, y));
      if (opts.drag) {
        const Eigen::Vector2d va = forcing.V_atm(t, x, y), vo = forcing.V_ocn(t, x, y);
        const Eigen::Vector2d rel = vo - v;
        const Eigen::Vector2d tau = params.rho_atm * params.C_atm * va.norm() * (params.R_atm * va) +
                                    params.rho_ocn * params.C_ocn * rel.norm() * (params.R_ocn * rel);
        drag.set(i, j, tau / mass(i, j));
      }
    }
  u.v.x += dt * (cor.x + drag.x + tilt.x);
  u.v.y += dt * (cor.y + drag.y + tilt.y);
  b.coriolis = dt * weighted_sum(w, mass, cor);
  b.drag = dt * weighted_sum(w, mass, drag);
  b.height = dt * weighted_sum(w, mass, tilt);

  if (opts.sources) {
    const ScalarField h = u.h, a = u.a;
    for (int p = 0; p < g.size(); ++p) {
      u.h(p) = h(p) + dt * source_h(h(p), a(p), forcing.f_gr, params.kappa);
      u.a(p) = a(p) + dt * source_a(h(p), a(p), forcing.f_gr, params.kappa);
    }
  }
  u.v = enforce_dirichlet(u.v);
  b.after = total_momentum(u, params);
  out.u = std::move(u);
  return out;
}

EulerianTrajectory run_eulerian(const StateField& u0, const RheologyParams& params,
                                const ForcingFields& forcing, double T, double dt,
                                const DiffOps& ops, const EulerianOptions& opts) {
  EulerianTrajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(u0);
  traj.cfl.push_back(0.0);
  traj.admissibility.push_back(validate_state(u0, params));
  if (T <= 0.0) return traj;
  const int n = step_count(T, dt);
  const double h = T / n;
  for (int k = 0; k < n; ++k) {
    EulerianStep s = step_eulerian(traj.states.back(), params, forcing, h, k * h, ops, opts);
    traj.times.push_back((k + 1) * h);
    traj.cfl.push_back(s.cfl);
    traj.admissibility.push_back(validate_state(s.u, params));
    traj.states.push_back(std::move(s.u));
  }
  return traj;
}

}  // namespace hvp
