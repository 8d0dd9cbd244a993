#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "hvp/fields.hpp"

namespace test {

using std::numbers::pi;

inline hvp::ScalarField random_field(const hvp::Grid& g, std::mt19937_64& rng, double lo = -1.0,
                                     double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  hvp::ScalarField f(g.nx, g.ny);
  for (int k = 0; k < f.size(); ++k) f(k) = d(rng);
  return f;
}

/// Smooth admissible state: v vanishes on the boundary, h and a are cosine bumps.
inline hvp::StateField smooth_state(const hvp::Grid& g, double U = 0.1, double h0 = 1.0,
                                    double a0 = 0.6) {
  hvp::StateField u = hvp::StateField::zero(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i), y = g.y(j);
      u.v.x(i, j) = U * std::sin(pi * x) * std::sin(pi * y);
      u.v.y(i, j) = 0.5 * U * std::sin(2 * pi * x) * std::sin(pi * y);
      u.h(i, j) = h0 + 0.2 * std::cos(pi * x) * std::cos(pi * y);
      u.a(i, j) = a0 + 0.05 * std::cos(pi * x) * std::sin(pi * y);
    }
  u.v = hvp::enforce_dirichlet(u.v);
  return u;
}

inline hvp::StateField constant_state(const hvp::Grid& g, double h, double a) {
  hvp::StateField u = hvp::StateField::zero(g);
  u.h.setConstant(h);
  u.a.setConstant(a);
  return u;
}

inline double max_abs(const hvp::ScalarField& f) { return f.abs().maxCoeff(); }

}  // namespace test
