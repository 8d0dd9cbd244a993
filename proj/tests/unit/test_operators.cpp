#include <doctest.h>

#include "helpers.hpp"
#include "hvp/operators.hpp"
#include "hvp/sector.hpp"

using namespace hvp;

namespace {

RheologyParams moderate() {
  RheologyParams p;
  p.delta = 0.1;
  p.p_star = 1.0;
  p.c_bullet = 2.0;
  return p;
}

/// Interior rows at least two nodes away from the boundary.
bool deep(const Grid& g, int node) {
  const int i = node % g.nx, j = node / g.nx;
  return i >= 2 && j >= 2 && i <= g.nx - 3 && j <= g.ny - 3;
}

}  // namespace

TEST_CASE("stencils are exact on quadratics") {
  const Grid g(9, 7, 1.0, 0.6);
  const DiffOps ops(g);
  const ScalarField f =
      sample(g, [](double x, double y) { return 1 + 2 * x + 3 * y + x * x - x * y + 2 * y * y; });
  const ScalarField fx = sample(g, [](double x, double y) { return 2 + 2 * x - y; });
  const ScalarField fy = sample(g, [](double x, double y) { return 3 - x + 4 * y; });
  CHECK(test::max_abs(apply(ops.d(0), f) - fx) < 1e-11);
  CHECK(test::max_abs(apply(ops.d(1), f) - fy) < 1e-11);
  CHECK(test::max_abs(apply(ops.dd(0, 0), f) - 2.0) < 1e-9);
  CHECK(test::max_abs(apply(ops.dd(1, 1), f) - 4.0) < 1e-9);
  CHECK(test::max_abs(apply(ops.dd(0, 1), f) + 1.0) < 1e-9);
  CHECK(test::max_abs(apply(ops.dd(1, 0), f) + 1.0) < 1e-9);
  const ScalarField cubic = sample(g, [](double x, double) { return x * x * x; });
  CHECK(test::max_abs(apply(ops.dd(0, 0), cubic) - sample(g, [](double x, double) { return 6 * x; })) <
        1e-9);
}

TEST_CASE("stack layout round trip") {
  const Grid g(6, 5, 1.0, 1.0);
  const StackLayout L(g);
  CHECK(L.interior() == 12);
  CHECK(L.nodes() == 30);
  CHECK(L.size() == 2 * 12 + 2 * 30);
  CHECK(L.interior_index(0) == -1);
  CHECK(L.node_of_interior(0) == g.index(1, 1));
  for (int r = 0; r < L.interior(); ++r) CHECK(L.interior_index(L.node_of_interior(r)) == r);
  std::mt19937_64 rng(5);
  StateField u(g, {test::random_field(g, rng), test::random_field(g, rng)}, test::random_field(g, rng),
               test::random_field(g, rng));
  const StateField back = L.unpack(L.pack(u));
  const VectorField vd = enforce_dirichlet(u.v);
  CHECK(test::max_abs(back.v.x - vd.x) == 0.0);
  CHECK(test::max_abs(back.v.y - vd.y) == 0.0);
  CHECK(test::max_abs(back.h - u.h) == 0.0);
  CHECK(test::max_abs(back.a - u.a) == 0.0);
}

TEST_CASE("A^H at a constant state reproduces the coefficient tensor") {
  const Grid g = Grid::unit_square(11);
  const DiffOps ops(g);
  const auto p = moderate();
  const StateField u1 = test::constant_state(g, 1.2, 0.7);
  const SpMat ah = assemble_linearized_hibler(u1, ops, p);
  const StackLayout L(g);
  const auto ct = coeff_tensor<double>(Eigen::Matrix2d::Zero(), 1.2, 0.7, p);

  // Affine velocity: every second derivative vanishes.
  StateField w = StateField::zero(g);
  w.v.x = sample(g, [](double x, double y) { return 0.3 + x - 2 * y; });
  w.v.y = sample(g, [](double x, double y) { return -1 + 0.5 * x + y; });
  Eigen::VectorXd r = ah * L.pack(w).head(2 * L.interior());
  for (int k = 0; k < L.interior(); ++k) {
    if (!deep(g, L.node_of_interior(k))) continue;
    CHECK(std::abs(r(k)) < 1e-10);
    CHECK(std::abs(r(L.interior() + k)) < 1e-10);
  }

  // v = (x^2, 0): row i equals -2 a_i1^11.
  w.v.x = sample(g, [](double x, double) { return x * x; });
  w.v.y.setZero();
  r = ah * L.pack(w).head(2 * L.interior());
  for (int k = 0; k < L.interior(); ++k) {
    if (!deep(g, L.node_of_interior(k))) continue;
    CHECK(r(k) == doctest::Approx(-2 * ct.a(0, 0)).epsilon(1e-9));
    CHECK(std::abs(r(L.interior() + k) + 2 * ct.a(2, 0)) < 1e-9);
  }
}

TEST_CASE("B1 at a constant state") {
  const Grid g = Grid::unit_square(9);
  const DiffOps ops(g);
  const auto p = moderate();
  const double h1 = 1.5, a1 = 0.4;
  const SpMat b1 = assemble_B1(test::constant_state(g, h1, a1), ops, p);
  const StackLayout L(g);
  CHECK(b1.rows() == 2 * L.interior());
  CHECK(b1.cols() == 2 * L.nodes());
  Eigen::VectorXd ha(2 * L.nodes());
  ha.head(L.nodes()) = flat(sample(g, [](double x, double) { return x; }));
  ha.tail(L.nodes()) = flat(sample(g, [](double, double y) { return 2 * y; }));
  const Eigen::VectorXd r = b1 * ha;
  const double dPdh = ice_strength_dh(a1, p), dPda = ice_strength_da(h1, a1, p);
  for (int k = 0; k < L.interior(); ++k) {
    CHECK(r(k) == doctest::Approx(dPdh / (2 * h1)));
    CHECK(r(L.interior() + k) == doctest::Approx(2 * dPda / (2 * h1)));
  }
}

TEST_CASE("operator matrix blocks") {
  const Grid g = Grid::unit_square(8);
  const DiffOps ops(g);
  const auto p = moderate();
  const StateField u1 = test::smooth_state(g, 0.2);
  const double omega = 3.0;
  const DiscreteOperator op = assemble_operator_matrix(u1, ops, p, omega);
  const StackLayout& L = op.layout;
  const int m2 = 2 * L.interior(), n = L.nodes();
  CHECK(op.matrix.rows() == L.size());

  SpMat id(m2, m2);
  id.setIdentity();
  const SpMat ah = assemble_linearized_hibler(u1, ops, p);
  CHECK((SpMat(block(op.matrix, 0, m2, 0, m2)) - (omega * id - ah)).norm() < 1e-12);
  CHECK((SpMat(block(op.matrix, 0, m2, m2, 2 * n)) - assemble_B1(u1, ops, p)).norm() < 1e-12);
  CHECK((SpMat(block(op.matrix, m2, n, 0, m2)) - assemble_scaled_div(u1.h, L, ops)).norm() < 1e-12);
  CHECK(block(op.matrix, m2, n, m2 + n, n).norm() == 0.0);

  // Zero velocity: the transport rows reduce to omega times (h, a).
  StateField w = test::smooth_state(g, 0.0, 2.0, 0.5);
  const Eigen::VectorXd r = op.matrix * L.pack(w);
  CHECK((r.tail(2 * n) - omega * L.pack(w).tail(2 * n)).norm() < 1e-12);
}

TEST_CASE("transport rows vanish on divergence-free velocity") {
  auto residual = [](int n) {
    const Grid g = Grid::unit_square(n);
    const DiffOps ops(g);
    const double pi = test::pi;
    // v = curl psi with psi = sin^2(pi x) sin^2(pi y).
    StateField w = StateField::zero(g);
    w.v.x = sample(g, [pi](double x, double y) {
      return 2 * pi * std::pow(std::sin(pi * x), 2) * std::sin(pi * y) * std::cos(pi * y);
    });
    w.v.y = sample(g, [pi](double x, double y) {
      return -2 * pi * std::pow(std::sin(pi * y), 2) * std::sin(pi * x) * std::cos(pi * x);
    });
    const StateField u1 = test::constant_state(g, 1.0, 0.6);
    const DiscreteOperator op = assemble_operator_matrix(u1, ops, moderate(), 0.0);
    const SpMat rows = block(op.matrix, op.layout.size() - 2 * g.size(), 2 * g.size(), 0, op.layout.size());
    return (rows * op.layout.pack(w)).cwiseAbs().maxCoeff();
  };
  const double e1 = residual(17), e2 = residual(33);
  CHECK(e2 < 0.05);
  CHECK(e1 / e2 > 3.0);
}

TEST_CASE("plane-wave response matches the symbol") {
  const int n = 81;
  const Grid g = Grid::unit_square(n);
  const DiffOps ops(g);
  const auto p = moderate();
  const SpMat ah = assemble_linearized_hibler(test::constant_state(g, 1.0, 0.8), ops, p);
  const StackLayout L(g);
  const auto ct = coeff_tensor<double>(Eigen::Matrix2d::Zero(), 1.0, 0.8, p);
  const Eigen::Vector2d xi(2 * test::pi, 3 * test::pi);
  const Eigen::Matrix2d M = symbol_matrix<double>(ct.a, xi);
  for (int j = 0; j < 2; ++j) {
    StateField w = StateField::zero(g);
    ScalarField wave = sample(g, [&](double x, double y) { return std::cos(xi.x() * x + xi.y() * y); });
    (j == 0 ? w.v.x : w.v.y) = wave;
    const Eigen::VectorXd r = ah * L.pack(w).head(2 * L.interior());
    double err = 0.0;
    for (int k = 0; k < L.interior(); ++k) {
      const int node = L.node_of_interior(k);
      if (!deep(g, node)) continue;
      for (int i = 0; i < 2; ++i)
        err = std::max(err, std::abs(r(i * L.interior() + k) - M(i, j) * wave(node)));
    }
    CHECK(err < 2e-2 * M.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("Dirichlet Laplacian lies in the sector") {
  const Grid g = Grid::unit_square(12);
  const SpMat lap = assemble_dirichlet_laplacian(g);
  const Eigen::VectorXcd ev = dense_spectrum(lap);
  CHECK(ev.imag().cwiseAbs().maxCoeff() < 1e-8);
  CHECK(ev.real().minCoeff() == doctest::Approx(2 * test::pi * test::pi).epsilon(0.05));
  const SectorReport rep = sector_probe(ev, {0.0, 1.0});
  CHECK(rep.entries[0].pass);
  CHECK(rep.chosen_omega == 0.0);
}

TEST_CASE("large omega shifts the spectrum to the right half-plane") {
  const Grid g = Grid::unit_square(8);
  const DiffOps ops(g);
  const DiscreteOperator op = assemble_operator_matrix(test::smooth_state(g, 0.3), ops, moderate(), 0.0);
  const SectorReport rep = sector_probe(op.matrix, {1e6});
  CHECK(rep.entries[0].min_re > 0.0);
  const OmegaSelection sel = select_omega(test::constant_state(g, 1.0, 0.6), moderate());
  CHECK(sel.omega >= 1.0);
  CHECK(sel.report.entries.front().omega == 1.0);
  CHECK(sel.report.chosen_omega == sel.omega);
}
