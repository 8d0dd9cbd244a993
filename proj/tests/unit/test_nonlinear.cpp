#include <doctest.h>

#include "helpers.hpp"
#include "hvp/errors.hpp"
#include "hvp/picard.hpp"

using namespace hvp;
using Eigen::Matrix2d;

namespace {

RheologyParams moderate() {
  RheologyParams p;
  p.delta = 0.1;
  p.c_bullet = 2.0;
  return p;
}

PicardOptions quick(double omega = 1.0) {
  PicardOptions o;
  o.T = 0.02;
  o.dt = 0.005;
  o.tol = 1e-10;
  o.omega = omega;
  return o;
}

FlowMap constant_map(const Grid& g, const Matrix2d& grad_x) {
  FlowMap m = FlowMap::identity(g);
  m.grad_x.assign(g.size(), grad_x);
  m.grad_y.assign(g.size(), grad_x.inverse());
  return m;
}

double deep_max(const Grid& g, const ScalarField& f) {
  return f.block(2, 2, g.nx - 4, g.ny - 4).abs().maxCoeff();
}

}  // namespace

TEST_CASE("transformed strain for affine velocity and constant map") {
  const Grid g = Grid::unit_square(7);
  const DiffOps ops(g);
  Matrix2d D;  // D(l, n) = d v_l / d y_n
  D << 0.3, -1.2, 0.7, 0.4;
  VectorField v = VectorField::zero(g);
  v.x = sample(g, [&](double x, double y) { return D(0, 0) * x + D(0, 1) * y; });
  v.y = sample(g, [&](double x, double y) { return D(1, 0) * x + D(1, 1) * y; });

  const TensorField id(g.size(), Matrix2d::Identity());
  const auto e0 = transformed_strain(ops, v, id);
  const Matrix2d sym = 0.5 * (D + D.transpose());
  for (const auto& e : e0) CHECK((e - sym).norm() < 1e-12);

  Matrix2d X;
  X << 1, 0.3, 0, 1;  // shear flow map at t = 0.3
  const Matrix2d G = X.inverse();
  const auto e1 = transformed_strain(ops, v, TensorField(g.size(), G));
  const Matrix2d DG = D * G;
  for (const auto& e : e1) CHECK((e - 0.5 * (DG + DG.transpose())).norm() < 1e-12);
  CHECK(test::max_abs(transformed_div(ops, v, TensorField(g.size(), G)) - DG.trace()) < 1e-12);
}

TEST_CASE("four-term strain derivative agrees with differencing the strain") {
  const Grid g = Grid::unit_square(9);
  const DiffOps ops(g);
  VectorField v = VectorField::zero(g);
  v.x = sample(g, [](double x, double y) { return x * x - 0.5 * x * y + y; });
  v.y = sample(g, [](double x, double y) { return 0.2 * y * y + x * y - x; });
  Matrix2d X;
  X << 1.1, 0.2, -0.1, 0.9;
  const TensorField G(g.size(), X.inverse());
  const auto direct = transformed_strain_derivative(ops, v, G);
  const auto fd = tensor_gradient(ops, transformed_strain(ops, v, G));
  for (int m = 0; m < 2; ++m)
    for (int p = 0; p < g.size(); ++p) CHECK((direct[m][p] - fd[m][p]).norm() < 1e-9);
}

TEST_CASE("identity-flow operator converges to the divergence form") {
  auto gap = [](int n) {
    const Grid g = Grid::unit_square(n);
    const DiffOps ops(g);
    const StateField u = test::smooth_state(g, 0.3);
    const auto p = moderate();
    const FlowMap id = FlowMap::identity(g);
    const VectorField a = apply_transformed_hibler(u, id, ops, p);
    const VectorField b = hibler_divergence_form(u, ops, p);
    return std::max(deep_max(g, a.x - b.x), deep_max(g, a.y - b.y));
  };
  const double e1 = gap(33), e2 = gap(65);
  CHECK(e1 / e2 > 3.0);
}

TEST_CASE("assemble_rhs at a rest state") {
  const Grid g = Grid::unit_square(8);
  const DiffOps ops(g);
  const auto p = moderate();
  const StateField u = test::constant_state(g, 1.4, 0.6);
  const double omega = 2.5;
  const FrozenSystem sys = build_frozen_system(u, ops, p, omega);
  const FlowMap id = FlowMap::identity(g);
  const RhsFields f = assemble_rhs(u, id, sys, ops, p, ForcingFields::none(), 0.0);
  CHECK(test::max_abs(f.F1.x) < 1e-12);
  CHECK(test::max_abs(f.F1.y) < 1e-12);
  CHECK(test::max_abs(f.F2 - omega * 1.4) < 1e-12);
  CHECK(test::max_abs(f.F3 - omega * 0.6) < 1e-12);

  ForcingFields grow = ForcingFields::none();
  grow.f_gr = GrowthRate::constant(0.5);
  const RhsFields fg = assemble_rhs(u, id, sys, ops, p, grow, 0.0);
  CHECK(test::max_abs(fg.F2 - (omega * 1.4 + 0.5)) < 1e-12);
  CHECK(test::max_abs(fg.F3 - (omega * 0.6 + 0.5 / p.kappa * 0.4)) < 1e-9);

  StateField bad = u;
  bad.a(3, 3) = 1.0;
  CHECK_THROWS_AS(assemble_rhs(bad, id, sys, ops, p, ForcingFields::none(), 0.0), BlowupSignal);
}

TEST_CASE("drag acceleration values") {
  const Grid g = Grid::unit_square(4);
  RheologyParams p;
  p.rho_atm = 1.0;
  p.C_atm = 1.0;
  p.rho_ocn = 2.0;
  p.C_ocn = 0.5;
  ForcingFields f = ForcingFields::none();
  f.V_atm = [](double, double, double) { return Eigen::Vector2d(3, 4); };
  f.V_ocn = [](double, double, double) { return Eigen::Vector2d(1, 0); };
  const StateField u = test::constant_state(g, 2.0, 0.5);
  const VectorField acc = drag_acceleration(u, mapped_positions(FlowMap::identity(g)), p, f, 0.0);
  // (5 (3, 4) + 1 (1, 0)) / 2
  CHECK(test::max_abs(acc.x - 8.0) < 1e-14);
  CHECK(test::max_abs(acc.y - 10.0) < 1e-14);

  p.R_ocn = RheologyParams::rotation(test::pi / 2);
  p.rho_atm = 0.0;
  const VectorField rot = drag_acceleration(u, mapped_positions(FlowMap::identity(g)), p, f, 0.0);
  CHECK(test::max_abs(rot.x) < 1e-14);
  CHECK(test::max_abs(rot.y - 0.5) < 1e-14);
}

TEST_CASE("Picard at rest reproduces the rest state") {
  const Grid g = Grid::unit_square(8);
  const NormSuite ns(g);
  const StateField u0 = test::constant_state(g, 1.0, 0.5);
  // With omega = 0 the reference solution is the rest state itself.
  const PicardResult r = picard_solve(u0, moderate(), ForcingFields::none(), quick(0.0), ns);
  CHECK(r.termination == "converged");
  CHECK(r.iterations <= 2);
  CHECK(r.halvings == 0);
  for (const auto& s : r.states) {
    CHECK(test::max_abs(s.h - 1.0) < 1e-10);
    CHECK(test::max_abs(s.a - 0.5) < 1e-10);
    CHECK(test::max_abs(s.v.x) < 1e-10);
  }
  CHECK(r.final_map.health.sup_dev < 1e-10);
}

TEST_CASE("Picard solution: omega independence, residual and determinism") {
  const Grid g = Grid::unit_square(10);
  const NormSuite ns(g);
  const auto p = moderate();
  const StateField u0 = test::smooth_state(g, 0.1);
  const PicardResult a = picard_solve(u0, p, ForcingFields::none(), quick(1.0), ns);
  const PicardResult b = picard_solve(u0, p, ForcingFields::none(), quick(4.0), ns);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t i = 1; i < a.deltas.size(); ++i) CHECK(a.deltas[i] < a.deltas[i - 1]);
  const StateField d = a.states.back() - b.states.back();
  CHECK(test::max_abs(d.v.x) < 1e-8);
  CHECK(test::max_abs(d.h) < 1e-8);

  const std::size_t N = a.states.size() - 1;
  const StateField res = transformed_residual(a.states[N - 1], a.states[N], a.final_map, ns.ops(), p,
                                              ForcingFields::none(), a.times[N], a.dt);
  CHECK(test::max_abs(res.v.x) < 1e-6);
  CHECK(test::max_abs(res.v.y) < 1e-6);
  CHECK(test::max_abs(res.h) < 1e-6);
  CHECK(test::max_abs(res.a) < 1e-6);

  const PicardResult c = picard_solve(u0, p, ForcingFields::none(), quick(1.0), ns);
  CHECK(c.deltas == a.deltas);
  CHECK((c.states.back().v.x == a.states.back().v.x).all());
}

TEST_CASE("dependence with a zero perturbation") {
  const Grid g = Grid::unit_square(8);
  const NormSuite ns(g);
  const auto rows = dependence_experiment(test::smooth_state(g, 0.2), {0.0, 1e-3}, moderate(),
                                          ForcingFields::none(), quick(), ns);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].diff_e1 == 0.0);
  CHECK(rows[0].ratio == 0.0);
  CHECK(rows[1].ratio > 0.0);
}
