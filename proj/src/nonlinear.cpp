#include "hvp/nonlinear.hpp"

#include <algorithm>
#include <cmath>

#include "hvp/errors.hpp"
#include "hvp/rheology.hpp"
#include "hvp/thermo.hpp"

namespace hvp {
namespace {

Eigen::Matrix2d sym(const Eigen::Matrix2d& m) { return 0.5 * (m + m.transpose()); }

/// H[m](l, n) = d_m d_n v_l per node.
std::array<TensorField, 2> velocity_hessian(const DiffOps& ops, const VectorField& v) {
  const ScalarField* comp[2] = {&v.x, &v.y};
  ScalarField d[2][2][2];
  for (int l = 0; l < 2; ++l)
    for (int m = 0; m < 2; ++m)
      for (int n = m; n < 2; ++n) {
        d[l][m][n] = apply(ops.dd(m, n), *comp[l]);
        if (n != m) d[l][n][m] = d[l][m][n];
      }
  std::array<TensorField, 2> out;
  const auto size = static_cast<std::size_t>(v.x.size());
  for (int m = 0; m < 2; ++m) {
    out[m].resize(size);
    for (std::size_t p = 0; p < size; ++p)
      out[m][p] << d[0][m][0](p), d[0][m][1](p), d[1][m][0](p), d[1][m][1](p);
  }
  return out;
}

StateField require_admissible(const StateField& u, const RheologyParams& params, double t) {
  const AdmissibilityReport rep = validate_state(u, params);
  if (!rep.in_V) {
    throw BlowupSignal("state left V at t = " + std::to_string(t) +
                           " (min h - kappa = " + std::to_string(rep.margin_h) +
                           ", a margin = " + std::to_string(rep.margin_a) + ")",
                       t);
  }
  return u;
}

VectorField from_vector(const StackLayout& layout, const Eigen::VectorXd& x, int comp_rows) {
  VectorField out = VectorField::zero(layout.grid());
  for (int r = 0; r < layout.interior(); ++r) {
    out.x(layout.node_of_interior(r)) = x(r);
    out.y(layout.node_of_interior(r)) = x(comp_rows + r);
  }
  return out;
}

Eigen::VectorXd interior_velocity(const StackLayout& layout, const VectorField& v) {
  Eigen::VectorXd x(2 * layout.interior());
  for (int r = 0; r < layout.interior(); ++r) {
    x(r) = v.x(layout.node_of_interior(r));
    x(layout.interior() + r) = v.y(layout.node_of_interior(r));
  }
  return x;
}

}  // namespace

std::array<TensorField, 2> tensor_gradient(const DiffOps& ops, const TensorField& t) {
  const Grid& g = ops.grid();
  std::array<TensorField, 2> out{TensorField(t.size()), TensorField(t.size())};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      ScalarField e(g.nx, g.ny);
      for (int p = 0; p < g.size(); ++p) e(p) = t[p](r, c);
      for (int m = 0; m < 2; ++m) {
        const ScalarField de = apply(ops.d(m), e);
        for (int p = 0; p < g.size(); ++p) out[m][p](r, c) = de(p);
      }
    }
  return out;
}

TransformedStrain transformed_strain(const DiffOps& ops, const VectorField& v,
                                     const TensorField& grad_y) {
  const TensorField gv = gradient(ops, v);
  TransformedStrain out(gv.size());
  // L = gv G has L(l, j) = dv_l/dx_j.
  for (std::size_t p = 0; p < gv.size(); ++p) out[p] = sym(gv[p] * grad_y[p]);
  return out;
}

std::array<TensorField, 2> transformed_strain_derivative(const DiffOps& ops, const VectorField& v,
                                                         const TensorField& grad_y) {
  const TensorField gv = gradient(ops, v);
  const auto hv = velocity_hessian(ops, v);
  const auto dg = tensor_gradient(ops, grad_y);
  std::array<TensorField, 2> out{TensorField(gv.size()), TensorField(gv.size())};
  for (int m = 0; m < 2; ++m)
    for (std::size_t p = 0; p < gv.size(); ++p)
      out[m][p] = sym(gv[p] * dg[m][p] + hv[m][p] * grad_y[p]);
  return out;
}

VectorField apply_transformed_hibler(const StateField& u, const FlowMap& flow, const DiffOps& ops,
                                     const RheologyParams& params) {
  const Grid& g = u.grid;
  if (flow.grad_y.size() != static_cast<std::size_t>(g.size())) {
    throw InvertibilityLost("transformed operator needs an inverted flow map", -1, flow.time);
  }
  const TensorField& G = flow.grad_y;
  const TensorField gv = gradient(ops, u.v);
  const auto hv = velocity_hessian(ops, u.v);
  const auto dg = tensor_gradient(ops, G);
  const VectorField gh = grad_h(ops, u.h), ga = grad_h(ops, u.a);
  VectorField out = VectorField::zero(g);
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      const int p = g.index(i, j);
      const double h = u.h(p), a = u.a(p);
      if (h < params.kappa) throw AssemblyError("transformed operator evaluated with h < kappa");
      const Eigen::Matrix2d eps = sym(gv[p] * G[p]);
      Eigen::Matrix2d dy_eps[2];
      for (int m = 0; m < 2; ++m) dy_eps[m] = sym(gv[p] * dg[m][p] + hv[m][p] * G[p]);
      // dx_eps[k] = sum_m G(m, k) dy_eps[m]
      Eigen::Matrix2d dx_eps[2];
      for (int k = 0; k < 2; ++k) dx_eps[k] = G[p](0, k) * dy_eps[0] + G[p](1, k) * dy_eps[1];
      const double P = ice_strength(h, a, params);
      const auto ct = coeff_tensor_from_strength(eps, P, h, params);
      const Eigen::Vector2d gyP = ice_strength_dh(a, params) * Eigen::Vector2d(gh.x(p), gh.y(p)) +
                                  ice_strength_da(h, a, params) * Eigen::Vector2d(ga.x(p), ga.y(p));
      const Eigen::Vector2d gxP = G[p].transpose() * gyP;
      const Eigen::Matrix2d se = apply_s(eps, params.e);
      const double low = 1.0 / (2.0 * params.rho_ice * h * ct.delta_reg);
      Eigen::Vector2d r = Eigen::Vector2d::Zero();
      for (int ci = 0; ci < 2; ++ci) {
        double acc = 0.0;
        for (int cj = 0; cj < 2; ++cj)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) acc -= ct.a(2 * ci + cj, 2 * k + l) * dx_eps[k](cj, l);
        acc += low * (gxP(0) * se(ci, 0) + gxP(1) * se(ci, 1));
        r(ci) = acc;
      }
      out.set(i, j, r);
    }
  return out;
}

VectorField hibler_divergence_form(const StateField& u, const DiffOps& ops,
                                   const RheologyParams& params) {
  const Grid& g = u.grid;
  const TensorField gv = gradient(ops, u.v);
  ScalarField s[2][2];
  for (auto& row : s)
    for (auto& f : row) f.resize(g.nx, g.ny);
  for (int p = 0; p < g.size(); ++p) {
    const Eigen::Matrix2d eps = sym(gv[p]);
    const Eigen::Matrix2d sd =
        stress_s_delta(eps, ice_strength(u.h(p), u.a(p), params), params.delta, params.e);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) s[r][c](p) = sd(r, c);
  }
  const ScalarField m = params.rho_ice * u.h;
  VectorField out{(apply(ops.d(0), s[0][0]) + apply(ops.d(1), s[0][1])) / m,
                  (apply(ops.d(0), s[1][0]) + apply(ops.d(1), s[1][1])) / m};
  return enforce_dirichlet(out);
}

VectorField apply_transformed_B(const StateField& u, const FlowMap& flow, const DiffOps& ops,
                                const RheologyParams& params) {
  const Grid& g = u.grid;
  const VectorField gh = grad_h(ops, u.h), ga = grad_h(ops, u.a);
  VectorField out = VectorField::zero(g);
  for (int p = 0; p < g.size(); ++p) {
    const double h = u.h(p), a = u.a(p);
    const Eigen::Vector2d gyP = ice_strength_dh(a, params) * Eigen::Vector2d(gh.x(p), gh.y(p)) +
                                ice_strength_da(h, a, params) * Eigen::Vector2d(ga.x(p), ga.y(p));
    const Eigen::Vector2d b = flow.grad_y[p].transpose() * gyP / (2.0 * params.rho_ice * h);
    out.x(p) = b.x();
    out.y(p) = b.y();
  }
  return out;
}

ScalarField transformed_div(const DiffOps& ops, const VectorField& v, const TensorField& grad_y) {
  const TensorField gv = gradient(ops, v);
  ScalarField out(v.x.rows(), v.x.cols());
  for (std::size_t p = 0; p < gv.size(); ++p) out(p) = (gv[p] * grad_y[p]).trace();
  return out;
}

FrozenSystem build_frozen_system(const StateField& u0, const DiffOps& ops,
                                 const RheologyParams& params, double omega) {
  FrozenSystem sys;
  sys.u0 = u0;
  sys.layout = StackLayout(u0.grid);
  sys.coeffs = frozen_coefficients(u0, ops, params);
  sys.hibler = assemble_linearized_hibler(sys.coeffs, sys.layout, ops, params);
  sys.b1 = assemble_B1(sys.coeffs, sys.layout, ops, params);
  sys.h0_div = assemble_scaled_div(sys.coeffs.h1, sys.layout, ops);
  sys.a0_div = assemble_scaled_div(sys.coeffs.a1, sys.layout, ops);
  sys.op = assemble_operator_matrix(u0, ops, params, omega);
  sys.omega = omega;
  return sys;
}

std::vector<Eigen::Vector2d> mapped_positions(const FlowMap& flow) {
  const Grid& g = flow.grid;
  const double xmax = g.x0 + g.lx(), ymax = g.y0 + g.ly();
  std::vector<Eigen::Vector2d> pos(g.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      pos[g.index(i, j)] = {std::clamp(g.x(i) + flow.disp.x(i, j), g.x0, xmax),
                            std::clamp(g.y(j) + flow.disp.y(i, j), g.y0, ymax)};
    }
  return pos;
}

VectorField drag_acceleration(const StateField& u, const std::vector<Eigen::Vector2d>& positions,
                              const RheologyParams& params, const ForcingFields& forcing, double t) {
  const Grid& g = u.grid;
  const double ka = params.rho_atm * params.C_atm, ko = params.rho_ocn * params.C_ocn;
  VectorField out = VectorField::zero(g);
  Eigen::Vector2d va_const, vo_const;
  if (forcing.spatially_constant) {
    va_const = forcing.V_atm(t, 0.0, 0.0);
    vo_const = forcing.V_ocn(t, 0.0, 0.0);
  }
  for (int p = 0; p < g.size(); ++p) {
    const Eigen::Vector2d& x = positions[p];
    const Eigen::Vector2d va = forcing.spatially_constant ? va_const : forcing.V_atm(t, x.x(), x.y());
    const Eigen::Vector2d vo = forcing.spatially_constant ? vo_const : forcing.V_ocn(t, x.x(), x.y());
    const Eigen::Vector2d rel = vo - Eigen::Vector2d(u.v.x(p), u.v.y(p));
    const Eigen::Vector2d tau =
        ka * va.norm() * (params.R_atm * va) + ko * rel.norm() * (params.R_ocn * rel);
    const Eigen::Vector2d acc = tau / (params.rho_ice * u.h(p));
    out.x(p) = acc.x();
    out.y(p) = acc.y();
  }
  return out;
}

namespace {

/// Explicit momentum terms -c v^perp - g grad H + tau / (rho h).
VectorField explicit_momentum(const StateField& u, const FlowMap& flow, const RheologyParams& params,
                              const ForcingFields& forcing, double t) {
  const Grid& g = u.grid;
  const auto pos = mapped_positions(flow);
  VectorField out = drag_acceleration(u, pos, params, forcing, t);
  for (int p = 0; p < g.size(); ++p) {
    const Eigen::Vector2d gH = forcing.grad_H(t, pos[p].x(), pos[p].y());
    out.x(p) += params.c_cor * u.v.y(p) - params.g * gH.x();
    out.y(p) += -params.c_cor * u.v.x(p) - params.g * gH.y();
  }
  return out;
}

}  // namespace

RhsFields assemble_rhs(const StateField& u_tilde, const FlowMap& flow, const FrozenSystem& sys,
                       const DiffOps& ops, const RheologyParams& params,
                       const ForcingFields& forcing, double t) {
  require_admissible(u_tilde, params, t);
  const StackLayout& L = sys.layout;
  const int m = L.interior();
  const Eigen::VectorXd vt = interior_velocity(L, u_tilde.v);
  Eigen::VectorXd ha(2 * L.nodes());
  ha << flat(u_tilde.h), flat(u_tilde.a);

  const VectorField frozen_hibler = from_vector(L, sys.hibler * vt, m);
  const VectorField frozen_b = from_vector(L, sys.b1 * ha, m);
  const VectorField th = apply_transformed_hibler(u_tilde, flow, ops, params);
  const VectorField tb = apply_transformed_B(u_tilde, flow, ops, params);
  const VectorField ex = explicit_momentum(u_tilde, flow, params, forcing, t);
  const double w = sys.omega;

  RhsFields f;
  f.F1 = {(th.x - frozen_hibler.x) - (tb.x - frozen_b.x) + w * u_tilde.v.x + ex.x,
          (th.y - frozen_hibler.y) - (tb.y - frozen_b.y) + w * u_tilde.v.y + ex.y};
  f.F1 = enforce_dirichlet(f.F1);

  const ScalarField divy = transformed_div(ops, u_tilde.v, flow.grad_y);
  ScalarField h0div(u_tilde.h.rows(), u_tilde.h.cols()), a0div(h0div.rows(), h0div.cols());
  Eigen::Map<Eigen::VectorXd>(h0div.data(), h0div.size()) = sys.h0_div * vt;
  Eigen::Map<Eigen::VectorXd>(a0div.data(), a0div.size()) = sys.a0_div * vt;
  f.F2.resize(h0div.rows(), h0div.cols());
  f.F3.resize(h0div.rows(), h0div.cols());
  for (Eigen::Index p = 0; p < h0div.size(); ++p) {
    const double h = u_tilde.h(p), a = u_tilde.a(p);
    f.F2(p) = h0div(p) - h * divy(p) + w * h + source_h(h, a, forcing.f_gr, params.kappa);
    f.F3(p) = a0div(p) - a * divy(p) + w * a + source_a(h, a, forcing.f_gr, params.kappa);
  }
  return f;
}

RhsFields assemble_rhs(const StateField& u_hat, const StateField& reference, const FlowMap& flow,
                       const FrozenSystem& sys, const DiffOps& ops, const RheologyParams& params,
                       const ForcingFields& forcing, double t) {
  return assemble_rhs(u_hat + reference, flow, sys, ops, params, forcing, t);
}

StateField transformed_residual(const StateField& u_n, const StateField& u_np1,
                                const FlowMap& flow_np1, const DiffOps& ops,
                                const RheologyParams& params, const ForcingFields& forcing,
                                double t_np1, double dt) {
  const StateField& u = u_np1;
  const VectorField th = apply_transformed_hibler(u, flow_np1, ops, params);
  const VectorField tb = apply_transformed_B(u, flow_np1, ops, params);
  const VectorField ex = explicit_momentum(u, flow_np1, params, forcing, t_np1);
  const ScalarField divy = transformed_div(ops, u.v, flow_np1.grad_y);
  StateField r = (1.0 / dt) * (u_np1 - u_n);
  r.v.x -= th.x - tb.x + ex.x;
  r.v.y -= th.y - tb.y + ex.y;
  r.v = enforce_dirichlet(r.v);
  for (Eigen::Index p = 0; p < u.h.size(); ++p) {
    const double h = u.h(p), a = u.a(p);
    r.h(p) -= -h * divy(p) + source_h(h, a, forcing.f_gr, params.kappa);
    r.a(p) -= -a * divy(p) + source_a(h, a, forcing.f_gr, params.kappa);
  }
  return r;
}

}  // namespace hvp
