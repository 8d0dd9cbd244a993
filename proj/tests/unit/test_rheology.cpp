#include <doctest.h>

#include <random>

#include "hvp/analysis.hpp"
#include "hvp/rheology.hpp"

using namespace hvp;
using Eigen::Matrix2d;
using Eigen::Matrix4d;

namespace {

Matrix2d sym(double a, double b, double c) {
  Matrix2d m;
  m << a, b, b, c;
  return m;
}

/// Brute-force a_ij^kl straight from the displayed formula, with S indexed
/// as S[(ik),(jl)].
double coeff_oracle(const Matrix2d& eps, double P, double h, double rho, double delta, double e,
                    int i, int j, int k, int l) {
  const double r = 1.0 / (e * e);
  auto S = [&](int a, int b, int c, int d) {
    // S_{ab}^{cd} from its entries in the (11,12,21,22) order.
    const int row = 2 * a + b, col = 2 * c + d;
    if ((row == 0 && col == 0) || (row == 3 && col == 3)) return 1.0 + r;
    if ((row == 0 && col == 3) || (row == 3 && col == 0)) return 1.0 - r;
    if ((row == 1 || row == 2) && (col == 1 || col == 2)) return r;
    return 0.0;
  };
  Matrix2d se = Matrix2d::Zero();
  double d2 = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          se(a, b) += S(a, b, c, d) * eps(c, d);
          d2 += eps(a, b) * S(a, b, c, d) * eps(c, d);
        }
  const double dr = std::sqrt(delta + d2);
  return -P / (2 * rho * h * dr) * (S(i, k, j, l) - se(i, k) * se(j, l) / (dr * dr));
}

}  // namespace

TEST_CASE("S matrix layout") {
  const Matrix4d s = s_matrix(2.0);
  CHECK((s - s.transpose()).norm() == 0.0);
  CHECK(apply_s<double>(Matrix2d::Identity(), 2.0).isApprox(2.0 * Matrix2d::Identity()));
  const Matrix2d m = sym(1, 2, 3);
  CHECK(unflatten<double>(flatten<double>(m)) == m);
  CHECK(flatten<double>(m)(1) == 2.0);
}

TEST_CASE("delta_sq examples") {
  CHECK(delta_sq<double>(Matrix2d::Zero(), 2.0) == 0.0);
  CHECK(delta_sq<double>(sym(1, 0, 0), 2.0) == doctest::Approx(1.25));
  CHECK(delta_sq_quadratic<double>(sym(1, 0, 0), 2.0) == doctest::Approx(1.25));
  CHECK(delta_sq<double>(Matrix2d::Identity(), 2.0) == doctest::Approx(4.0));
  CHECK(delta_sq_quadratic<double>(Matrix2d::Identity(), 2.0) == doctest::Approx(4.0));
}

TEST_CASE("delta_reg examples") {
  CHECK(delta_reg<double>(Matrix2d::Zero(), 1.0, 2.0) == 1.0);
  CHECK(delta_reg<double>(Matrix2d::Zero(), 4e-18, 2.0) == doctest::Approx(2e-9).epsilon(1e-14));
  CHECK(delta_reg<double>(sym(1, 0, 0), 0.75, 2.0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("ice strength and its derivatives") {
  RheologyParams p;
  p.p_star = 3.0;
  CHECK(ice_strength(1.0, 1.0, p) == 3.0);
  CHECK(ice_strength(0.0, 0.4, p) == 0.0);
  p.p_star = 1.0;
  p.c_bullet = 20.0;
  CHECK(ice_strength(1.0, 0.95, p) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  // Finite-difference oracle for the closed-form derivatives.
  const double h = 0.7, a = 0.6, s = 1e-6;
  const double fdh = (ice_strength(h + s, a, p) - ice_strength(h - s, a, p)) / (2 * s);
  const double fda = (ice_strength(h, a + s, p) - ice_strength(h, a - s, p)) / (2 * s);
  CHECK(ice_strength_dh(a, p) == doctest::Approx(fdh).epsilon(1e-8));
  CHECK(ice_strength_da(h, a, p) == doctest::Approx(fda).epsilon(1e-7));
}

TEST_CASE("viscosities examples") {
  auto v = viscosities<double>(Matrix2d::Zero(), 2.0, 1.0, 2.0);
  CHECK(v.zeta == 1.0);
  CHECK(v.eta == 0.25);
  v = viscosities<double>(sym(0.3, 0.1, -0.2), 0.0, 1.0, 2.0);
  CHECK(v.zeta == 0.0);
  CHECK(v.eta == 0.0);
  v = viscosities<double>(sym(1, 0, 0), 1.0, 0.75, 2.0);
  CHECK(v.zeta == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))));
  CHECK(v.eta == doctest::Approx(v.zeta / 4.0));
}

TEST_CASE("stress examples") {
  const Matrix2d s0 = stress_sigma<double>(Matrix2d::Zero(), 3.0, 0.1, 2.0);
  CHECK(s0.isApprox(-1.5 * Matrix2d::Identity()));
  CHECK(stress_sigma<double>(sym(0.2, 0.3, 0.1), 0.0, 0.1, 2.0).norm() == 0.0);
  // delta = 0 is admissible in this offline check only.
  CHECK(stress_sigma<double>(Matrix2d::Identity(), 2.0, 0.0, 2.0).norm() < 1e-15);
  CHECK(stress_sigma_s_form<double>(Matrix2d::Identity(), 2.0, 0.0, 2.0).norm() < 1e-15);
}

TEST_CASE("coefficient tensor at zero strain") {
  RheologyParams p;
  p.delta = 1.0;
  p.e = 2.0;
  const auto ct = coeff_tensor_from_strength<double>(Matrix2d::Zero(), 1.0, 1.0, p);
  // a_ij^kl at (2i + j, 2k + l); S_11^11 = 1.25 and S_21^21 = 1/e^2 = 0.25.
  CHECK(ct.a(0, 0) == doctest::Approx(-0.625));
  CHECK(ct.a(3, 0) == doctest::Approx(-0.125));
  CHECK(ct.a(1, 0) == 0.0);
  CHECK(ct.a(2, 0) == 0.0);
  const Matrix2d M = symbol_matrix<double>(ct.a, Eigen::Vector2d(1.0, 0.0));
  CHECK(M(0, 0) == doctest::Approx(-0.625));
  CHECK(M(1, 1) == doctest::Approx(-0.125));
  CHECK(M(0, 1) == 0.0);

  const auto z = coeff_tensor_from_strength<double>(sym(0.3, 0.1, 0.2), 0.0, 1.0, p);
  CHECK(z.a.norm() == 0.0);
  CHECK(symbol_matrix<double>(z.a, Eigen::Vector2d(0.6, 0.8)).norm() == 0.0);

  p.kappa = 0.1;
  CHECK_THROWS_AS(coeff_tensor<double>(Matrix2d::Zero(), 0.05, 0.5, p), AssemblyError);
  CHECK_NOTHROW(coeff_tensor<double>(Matrix2d::Zero(), 0.1, 0.5, p));
}

TEST_CASE("coefficient tensor against brute force, symmetry and bound") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2), pos(0.1, 3);
  RheologyParams p;
  for (int sample = 0; sample < 500; ++sample) {
    p.e = 1.0 + pos(rng);
    p.delta = pos(rng) * 1e-2;
    p.rho_ice = pos(rng);
    const Matrix2d eps = sym(u(rng), u(rng), u(rng));
    const double P = pos(rng), h = pos(rng);
    const auto ct = coeff_tensor_from_strength(eps, P, h, p);
    const Matrix4d s = s_matrix(p.e);
    const double bound = P / (2 * p.rho_ice * h) / std::sqrt(p.delta) * (s.cwiseAbs().maxCoeff() + 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) {
            const double a = ct.a(2 * i + j, 2 * k + l);
            CHECK(a == doctest::Approx(coeff_oracle(eps, P, h, p.rho_ice, p.delta, p.e, i, j, k, l))
                           .epsilon(1e-12)
                           .scale(std::abs(ct.a(0, 0))));
            CHECK(a == doctest::Approx(ct.a(2 * j + i, 2 * l + k)).epsilon(1e-14));
            CHECK(std::abs(a) <= bound);
          }
    CHECK((apply_s(eps, p.e) - apply_s(eps, p.e).transpose()).norm() == 0.0);
  }
}

TEST_CASE("identities over 1e5 random strains") {
  const IdentityReport r = rheology_identity_sweep(100000, 42);
  CHECK(r.max_delta_err <= 1e-12);
  CHECK(r.max_sigma_err <= 1e-12);
  CHECK(r.reg_bound);
}

TEST_CASE("symbol negativity over random admissible samples") {
  RheologyParams p;
  p.delta = 1e-4;
  p.p_star = 1.0;
  const auto samples = symbol_probe(10000, 64, 7, p);
  double worst = -1.0;
  for (const auto& s : samples) worst = std::max(worst, s.max_eig);
  CHECK(worst < 0.0);
}
