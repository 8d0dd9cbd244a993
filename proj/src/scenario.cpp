#include "hvp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hvp/errors.hpp"

namespace hvp {
namespace {

using std::numbers::pi;

StateField vortex_state(const Grid& g, const InitialSpec& in) {
  StateField u = StateField::zero(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = (g.x(i) - g.x0) / g.lx(), y = (g.y(j) - g.y0) / g.ly();
      const double sx = std::sin(pi * x), sy = std::sin(pi * y);
      u.v.x(i, j) = in.U0 * sx * sx * std::sin(2 * pi * y);
      u.v.y(i, j) = -in.U0 * std::sin(2 * pi * x) * sy * sy;
      const double bump = std::cos(pi * x) * std::cos(pi * y);
      u.h(i, j) = in.h_mean + in.h_amp * bump;
      u.a(i, j) = in.a_mean + in.a_amp * bump;
    }
  u.v = enforce_dirichlet(u.v);
  return u;
}

ForcingFields physical_forcing(const RunConfig& cfg) {
  const Grid g = cfg.make_grid();
  const double xc = g.x0 + 0.5 * g.lx(), yc = g.y0 + 0.5 * g.ly();
  const double radius = 0.5 * std::min(g.lx(), g.ly());
  const Eigen::Vector2d wind = cfg.forcing.wind, tilt = cfg.forcing.grad_H;
  const double gyre = cfg.forcing.ocean_gyre;

  ForcingFields f;
  f.V_atm = [wind](double, double, double) { return wind; };
  // Solid-body rotation reaching `gyre` at the inscribed circle.
  f.V_ocn = [=](double, double x, double y) {
    return Eigen::Vector2d(-(y - yc), x - xc) * (gyre / radius);
  };
  f.grad_H = [tilt](double, double, double) { return tilt; };
  f.spatially_constant = gyre == 0.0;
  const auto& name = cfg.forcing.growth;
  if (name == "zero") {
    f.f_gr = GrowthRate::zero();
  } else if (name == "constant") {
    f.f_gr = GrowthRate::constant(cfg.forcing.growth_g0);
  } else if (name == "tanh") {
    f.f_gr = GrowthRate::tanh_profile(cfg.forcing.growth_g0);
  } else {
    throw ConfigError("unknown growth profile " + name);
  }
  return f;
}

}  // namespace

Scenario build_scenario(const RunConfig& cfg) {
  Scenario s;
  s.name = cfg.scenario;
  s.params = cfg.params;
  const InitialSpec in = cfg.initial;
  if (cfg.scenario == "rest") {
    s.forcing = ForcingFields::none();
    s.initial = [in](const Grid& g) {
      StateField u = StateField::zero(g);
      u.h.setConstant(in.h_mean);
      u.a.setConstant(in.a_mean);
      return u;
    };
  } else if (cfg.scenario == "vortex" || cfg.scenario == "adversarial") {
    s.forcing = physical_forcing(cfg);
    s.initial = [in](const Grid& g) { return vortex_state(g, in); };
  } else {
    throw ConfigError("unknown scenario " + cfg.scenario);
  }
  return s;
}

}  // namespace hvp
