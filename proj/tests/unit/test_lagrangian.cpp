#include <doctest.h>

#include "helpers.hpp"
#include "hvp/errors.hpp"
#include "hvp/lagrangian.hpp"

using namespace hvp;
using Eigen::Matrix2d;

namespace {

FlowMap integrate(const Grid& g, const VectorField& v, int steps, double dt) {
  const DiffOps ops(g);
  FlowMap m = FlowMap::identity(g);
  for (int s = 0; s < steps; ++s) m = advance_flow_map(m, ops, v, v, dt);
  return m;
}

FlowMap with_gradient(const Grid& g, const Matrix2d& G) {
  FlowMap m = FlowMap::identity(g);
  m.grad_x.assign(g.size(), G);
  return m;
}

}  // namespace

TEST_CASE("zero velocity keeps the identity map") {
  const Grid g = Grid::unit_square(9);
  const FlowMap m = integrate(g, VectorField::zero(g), 5, 0.1);
  CHECK(m.is_identity());
  CHECK(m.time == doctest::Approx(0.5));
  CHECK(m.health.sup_dev == 0.0);
  CHECK(m.health.min_det == 1.0);
}

TEST_CASE("constant velocity translates") {
  const Grid g = Grid::unit_square(9);
  VectorField w = VectorField::zero(g);
  w.x.setConstant(0.3);
  w.y.setConstant(-0.2);
  const FlowMap m = integrate(g, w, 4, 0.05);
  CHECK(test::max_abs(m.disp.x - 0.06) < 1e-15);
  CHECK(test::max_abs(m.disp.y + 0.04) < 1e-15);
  for (const auto& G : m.grad_x) CHECK((G - Matrix2d::Identity()).norm() < 1e-13);
}

TEST_CASE("linear shear has the exact gradient") {
  const Grid g = Grid::unit_square(11);
  VectorField v = VectorField::zero(g);
  v.x = sample(g, [](double, double y) { return y; });
  const double t = 0.3;
  const FlowMap m = integrate(g, v, 3, t / 3);
  Matrix2d expect;
  expect << 1, t, 0, 1;
  for (const auto& G : m.grad_x) CHECK((G - expect).norm() < 1e-12);
  CHECK(m.health.sup_dev == doctest::Approx(t));
  CHECK(m.health.invertible);
}

TEST_CASE("inverse_gradient examples") {
  Matrix2d G;
  G << 2, 0, 0, 0.5;
  const auto inv = inverse_gradient({G});
  Matrix2d expect;
  expect << 0.5, 0, 0, 2;
  CHECK((inv[0] - expect).norm() < 1e-15);
  G << 1, 0.3, 0, 1;
  CHECK((inverse_gradient({G})[0] * G - Matrix2d::Identity()).norm() < 1e-15);
  G << 0.4, 0, 0, 0.5;
  CHECK_THROWS_AS(inverse_gradient({G}), InvertibilityLost);
}

TEST_CASE("invertibility criterion at one half") {
  const Grid g = Grid::unit_square(5);
  Matrix2d G = Matrix2d::Identity();
  G(0, 1) = 0.6;
  FlowMap bad = with_gradient(g, G);
  CHECK_FALSE(invertibility_check(bad).invertible);
  CHECK_THROWS_AS(invert(bad), InvertibilityLost);
  G(0, 1) = 0.4;
  FlowMap ok = with_gradient(g, G);
  const FlowHealth h = invertibility_check(ok);
  CHECK(h.invertible);
  CHECK(h.sup_dev == doctest::Approx(0.4));
  CHECK(h.min_det == doctest::Approx(1.0));
  // Neumann series bound ||Id - grad Y|| <= s / (1 - s).
  CHECK(h.sup_inv_dev <= 0.4 / 0.6 + 1e-14);
}

TEST_CASE("grad Y grad X = Id after inversion") {
  const Grid g = Grid::unit_square(17);
  const auto u = test::smooth_state(g, 0.5);
  FlowMap m = integrate(g, u.v, 2, 0.05);
  invert(m);
  REQUIRE(m.grad_y.size() == m.grad_x.size());
  for (std::size_t p = 0; p < m.grad_x.size(); ++p)
    CHECK((m.grad_y[p] * m.grad_x[p] - Matrix2d::Identity()).norm() < 1e-13);
}

TEST_CASE("one step of 2dt equals two steps of dt for steady velocity") {
  const Grid g = Grid::unit_square(13);
  const auto u = test::smooth_state(g, 0.5);
  const FlowMap a = integrate(g, u.v, 1, 0.2);
  const FlowMap b = integrate(g, u.v, 2, 0.1);
  CHECK(test::max_abs(a.disp.x - b.disp.x) < 1e-15);
  CHECK(test::max_abs(a.disp.y - b.disp.y) < 1e-15);
  for (std::size_t p = 0; p < a.grad_x.size(); ++p)
    CHECK((a.grad_x[p] - b.grad_x[p]).norm() < 1e-14);
}

TEST_CASE("composition with identity, constant and shifted maps") {
  const Grid g = Grid::unit_square(11);
  std::mt19937_64 rng(3);
  const ScalarField f = test::random_field(g, rng);
  const FlowMap id = FlowMap::identity(g);
  CHECK(test::max_abs(compose_with_map(f, id, Direction::forward) - f) < 1e-14);
  CHECK(test::max_abs(compose_with_map(f, id, Direction::inverse) - f) < 1e-14);

  FlowMap shift = FlowMap::identity(g);
  shift.disp.x.setConstant(0.1);
  const ScalarField c = ScalarField::Constant(g.nx, g.ny, 2.5);
  CHECK(test::max_abs(compose_with_map(c, shift, Direction::forward) - 2.5) < 1e-15);

  const ScalarField lin = sample(g, [](double x, double y) { return x + 2 * y; });
  int clamps = 0;
  const ScalarField fwd = compose_with_map(lin, shift, Direction::forward, &clamps);
  const ScalarField inv = compose_with_map(lin, shift, Direction::inverse);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i), y = g.y(j);
      if (x + 0.1 <= 1.0 + 1e-12) CHECK(fwd(i, j) == doctest::Approx(x + 0.1 + 2 * y));
      if (x - 0.1 >= -1e-12) CHECK(inv(i, j) == doctest::Approx(x - 0.1 + 2 * y));
    }
  // The last column lands outside the rectangle and is clamped.
  CHECK(clamps >= g.ny);
}

TEST_CASE("inverse composition undoes forward composition") {
  const Grid g = Grid::unit_square(33);
  const auto u = test::smooth_state(g, 1.0);
  FlowMap m = integrate(g, u.v, 2, 0.05);
  invert(m);
  const ScalarField f = sample(g, [](double x, double y) { return std::sin(x) * std::cos(y); });
  const ScalarField back =
      compose_with_map(compose_with_map(f, m, Direction::forward), m, Direction::inverse);
  CHECK(test::max_abs(back - f) < 5e-3);
}
