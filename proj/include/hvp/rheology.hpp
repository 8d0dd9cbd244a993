#pragma once

// Pointwise viscous-plastic constitutive algebra.
//
// Flattened 2x2 tensors use the index order (11, 12, 21, 22), i.e. entry
// (i, j) lives at slot 2i + j with zero-based i, j. The coefficient tensor
// a_ij^kl is stored as a 4x4 matrix A(2i + j, 2k + l).

#include <Eigen/Dense>
#include <cmath>

#include "hvp/errors.hpp"
#include "hvp/fields.hpp"

namespace hvp {

template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Mat4 = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar>
using Vec4 = Eigen::Matrix<Scalar, 4, 1>;

template <typename Scalar>
Vec4<Scalar> flatten(const Mat2<Scalar>& m) {
  return Vec4<Scalar>(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
}

template <typename Scalar>
Mat2<Scalar> unflatten(const Vec4<Scalar>& v) {
  Mat2<Scalar> m;
  m << v(0), v(1), v(2), v(3);
  return m;
}

template <typename Scalar>
Mat4<Scalar> s_matrix(Scalar e) {
  const Scalar r = Scalar(1) / (e * e);
  Mat4<Scalar> s = Mat4<Scalar>::Zero();
  s(0, 0) = s(3, 3) = Scalar(1) + r;
  s(0, 3) = s(3, 0) = Scalar(1) - r;
  s(1, 1) = s(1, 2) = s(2, 1) = s(2, 2) = r;
  return s;
}

/// The 2x2 tensor S eps.
template <typename Scalar>
Mat2<Scalar> apply_s(const Mat2<Scalar>& eps, Scalar e) {
  return unflatten<Scalar>(s_matrix(e) * flatten(eps));
}

/// Closed form of Delta^2(eps) for symmetric eps, written as a sum of
/// squares: (tr eps)^2 + ((eps11 - eps22)^2 + 4 eps12^2) / e^2.
template <typename Scalar>
Scalar delta_sq(const Mat2<Scalar>& eps, Scalar e) {
  const Scalar tr = eps(0, 0) + eps(1, 1);
  const Scalar d = eps(0, 0) - eps(1, 1);
  return tr * tr + (d * d + Scalar(4) * eps(0, 1) * eps(0, 1)) / (e * e);
}

/// eps^T S eps with the flattened tensor.
template <typename Scalar>
Scalar delta_sq_quadratic(const Mat2<Scalar>& eps, Scalar e) {
  const Vec4<Scalar> f = flatten(eps);
  return f.dot(s_matrix(e) * f);
}

template <typename Scalar>
Scalar delta_reg(const Mat2<Scalar>& eps, Scalar delta, Scalar e) {
  using std::sqrt;
  return sqrt(delta + delta_sq(eps, e));
}

template <typename Scalar>
Scalar ice_strength(Scalar h, Scalar a, const RheologyParams& p) {
  using std::exp;
  return Scalar(p.p_star) * h * exp(-Scalar(p.c_bullet) * (Scalar(1) - a));
}

/// dP/dh = p* exp(-c (1 - a)).
template <typename Scalar>
Scalar ice_strength_dh(Scalar a, const RheologyParams& p) {
  using std::exp;
  return Scalar(p.p_star) * exp(-Scalar(p.c_bullet) * (Scalar(1) - a));
}

/// dP/da = c P.
template <typename Scalar>
Scalar ice_strength_da(Scalar h, Scalar a, const RheologyParams& p) {
  return Scalar(p.c_bullet) * ice_strength(h, a, p);
}

template <typename Scalar>
struct Viscosities {
  Scalar zeta;
  Scalar eta;
};

template <typename Scalar>
Viscosities<Scalar> viscosities(const Mat2<Scalar>& eps, Scalar P, Scalar delta, Scalar e) {
  const Scalar zeta = P / (Scalar(2) * delta_reg(eps, delta, e));
  return {zeta, zeta / (e * e)};
}

/// sigma = 2 eta eps + (zeta - eta) tr(eps) Id - (P/2) Id.
template <typename Scalar>
Mat2<Scalar> stress_sigma(const Mat2<Scalar>& eps, Scalar P, Scalar delta, Scalar e) {
  const auto [zeta, eta] = viscosities(eps, P, delta, e);
  return Scalar(2) * eta * eps +
         ((zeta - eta) * eps.trace() - P / Scalar(2)) * Mat2<Scalar>::Identity();
}

template <typename Scalar>
Mat2<Scalar> stress_sigma(const Mat2<Scalar>& eps, Scalar h, Scalar a, const RheologyParams& p) {
  return stress_sigma(eps, ice_strength(h, a, p), Scalar(p.delta), Scalar(p.e));
}

/// S_delta = (P/2) S eps / Delta_delta, so that sigma = S_delta - (P/2) Id.
template <typename Scalar>
Mat2<Scalar> stress_s_delta(const Mat2<Scalar>& eps, Scalar P, Scalar delta, Scalar e) {
  return (P / Scalar(2)) * apply_s(eps, e) / delta_reg(eps, delta, e);
}

template <typename Scalar>
Mat2<Scalar> stress_sigma_s_form(const Mat2<Scalar>& eps, Scalar P, Scalar delta, Scalar e) {
  return stress_s_delta(eps, P, delta, e) - (P / Scalar(2)) * Mat2<Scalar>::Identity();
}

template <typename Scalar>
struct CoeffTensor {
  Mat4<Scalar> a;  ///< a(2i + j, 2k + l) = a_ij^kl
  Scalar P;
  Scalar delta_reg;
};

/// a_ij^kl = -(P / (2 rho h Delta)) (S[(ik),(jl)] - (S eps)_ik (S eps)_jl / Delta^2).
///
/// The first S index pairs the output component with the outer derivative,
/// the second pairs the unknown component with the inner derivative, which
/// makes -sum a_ij^kl d_k d_l v_j the principal part of div(S_delta)/(rho h).
template <typename Scalar>
CoeffTensor<Scalar> coeff_tensor_from_strength(const Mat2<Scalar>& eps, Scalar P, Scalar h,
                                               const RheologyParams& p) {
  const Scalar e = Scalar(p.e);
  const Mat4<Scalar> s = s_matrix(e);
  const Mat2<Scalar> se = apply_s(eps, e);
  const Scalar dr = delta_reg(eps, Scalar(p.delta), e);
  const Scalar scale = -P / (Scalar(2) * Scalar(p.rho_ice) * h * dr);
  CoeffTensor<Scalar> out{Mat4<Scalar>::Zero(), P, dr};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          out.a(2 * i + j, 2 * k + l) =
              scale * (s(2 * i + k, 2 * j + l) - se(i, k) * se(j, l) / (dr * dr));
        }
  return out;
}

template <typename Scalar>
CoeffTensor<Scalar> coeff_tensor(const Mat2<Scalar>& eps, Scalar h, Scalar a,
                                 const RheologyParams& p) {
  if (h < Scalar(p.kappa)) throw AssemblyError("coefficient tensor requested with h < kappa");
  return coeff_tensor_from_strength(eps, ice_strength(h, a, p), h, p);
}

/// M_ij = sum_kl a_ij^kl xi_k xi_l.
template <typename Scalar>
Mat2<Scalar> symbol_matrix(const Mat4<Scalar>& a, const Vec2<Scalar>& xi) {
  Mat2<Scalar> m = Mat2<Scalar>::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) m(i, j) += a(2 * i + j, 2 * k + l) * xi(k) * xi(l);
  return m;
}

}  // namespace hvp
