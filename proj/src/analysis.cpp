#include "hvp/analysis.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <thread>

#include "hvp/eulerian.hpp"
#include "hvp/lagrangian.hpp"
#include "hvp/operators.hpp"
#include "hvp/rheology.hpp"

namespace hvp {
namespace {

using std::numbers::pi;

double max_abs(const ScalarField& f) { return f.size() ? f.abs().maxCoeff() : 0.0; }

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (int i = 0; i < n; ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

/// Frozen state and exact solution profile of the smooth studies.
AnalyticState smooth_frozen() {
  AnalyticState s;
  s.v1.add(0.2, Profile::sine(1), Profile::sine(1));
  s.v2.add(0.1, Profile::sine(2), Profile::sine(1));
  s.h.add_constant(1.0).add(0.3, Profile::cosine(1), Profile::cosine(1));
  s.a.add_constant(0.8).add(0.1, Profile::sine(1), Profile::cosine(1));
  return s;
}

AnalyticState smooth_profile() {
  AnalyticState s;
  s.v1.add(0.5, Profile::sine(1), Profile::sine(2));
  s.v2.add(-0.4, Profile::sine(2), Profile::sine(1)).add(0.2, Profile::sine(1), Profile::sine(1));
  s.h.add(0.3, Profile::cosine(1), Profile::cosine(2)).add_constant(0.1);
  s.a.add(0.2, Profile::sine(1), Profile::cosine(1));
  return s;
}

AnalyticState polynomial_frozen() {
  const Profile bub = Profile::poly({0.0, 1.0, -1.0});  // s (1 - s)
  AnalyticState s;
  s.v1.add(0.8, bub, bub);
  s.v2.add(-0.5, bub, bub);
  s.h.add_constant(1.0).add(0.2, Profile::poly({0, 1}), Profile::one()).add(0.1, Profile::poly({0, 1}), Profile::poly({0, 1}));
  s.a.add_constant(0.7).add(0.1, Profile::poly({0, 1}), Profile::one()).add(-0.05, Profile::one(), Profile::poly({0, 1}));
  return s;
}

AnalyticState polynomial_profile() {
  const Profile bub = Profile::poly({0.0, 1.0, -1.0});
  AnalyticState s;
  s.v1.add(1.0, bub, bub);
  s.v2.add(-0.5, bub, bub);
  s.h.add_constant(0.2).add(1.0, Profile::poly({0, 1}), Profile::one()).add(-0.5, Profile::poly({0, 1}), Profile::poly({0, 1}));
  s.a.add_constant(0.1).add(-0.2, Profile::one(), Profile::poly({0, 1})).add(0.3, Profile::poly({0, 1}), Profile::poly({0, 1}));
  return s;
}

/// Time factor of the manufactured solution and its derivative.
struct TimeFactor {
  double (*g)(double);
  double (*dg)(double);
};

double lin(double t) { return 1.0 + t; }
double dlin(double) { return 1.0; }
double osc(double t) { return std::cos(2.0 * t) + std::sin(3.0 * t); }
double dosc(double t) { return -2.0 * std::sin(2.0 * t) + 3.0 * std::cos(3.0 * t); }

MmsRow run_level(const MmsConfig& cfg, int n, int steps) {
  const Grid g = Grid::unit_square(n);
  const DiffOps ops(g);
  const NormSuite norms(std::make_shared<const DiffOps>(g));
  const bool kernel = cfg.kind == MmsKind::kernel;
  const AnalyticState frozen = kernel ? polynomial_frozen() : smooth_frozen();
  const AnalyticState prof = kernel ? polynomial_profile() : smooth_profile();
  const TimeFactor tf = cfg.kind == MmsKind::temporal ? TimeFactor{osc, dosc} : TimeFactor{lin, dlin};

  const DiscreteOperator op = assemble_operator_matrix(frozen.sample(g), ops, cfg.params, cfg.omega);
  const StackLayout& layout = op.layout;
  const Eigen::VectorXd U = layout.pack(prof.sample(g));
  const Eigen::VectorXd AU = cfg.kind == MmsKind::temporal
                                 ? Eigen::VectorXd(op.matrix * U)
                                 : layout.pack(continuous_operator(frozen, prof, cfg.params, cfg.omega, g));
  const double dt = cfg.T / steps;
  RhsSeries rhs(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    const double t = k * dt;
    rhs[k] = tf.dg(t) * U + tf.g(t) * AU;
  }
  const StateField u0 = layout.unpack(tf.g(0.0) * U);
  const LinearTrajectory traj = solve_linear_ivp(op, u0, rhs, cfg.T, dt, cfg.scheme, norms);
  const StateField exact = layout.unpack(tf.g(cfg.T) * U);
  const StateField err = traj.states.back() - exact;

  MmsRow row;
  row.n = n;
  row.h = g.dx;
  row.dt = dt;
  row.err_v = std::max(max_abs(err.v.x), max_abs(err.v.y));
  row.err_h = max_abs(err.h);
  row.err_a = max_abs(err.a);
  row.err = std::max({row.err_v, row.err_h, row.err_a});
  row.scale = std::max({max_abs(exact.v.x), max_abs(exact.v.y), max_abs(exact.h), max_abs(exact.a)});
  return row;
}

double weighted_sq(const Grid& g, const ScalarField& f) {
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double w = ((i == 0 || i == g.nx - 1) ? 0.5 : 1.0) * ((j == 0 || j == g.ny - 1) ? 0.5 : 1.0);
      s += w * f(i, j) * f(i, j);
    }
  return s * g.dx * g.dy;
}

double relative(double diff, double ref) { return ref > 0.0 ? diff / ref : diff; }

CrossCheckLevel cross_level(const Scenario& sc, double T, int n, double dt, PicardOptions opts,
                            double p, double q) {
  const Grid g = Grid::unit_square(n);
  auto ops = std::make_shared<const DiffOps>(g);
  const NormSuite norms(ops, p, q);
  const StateField u0 = sc.initial(g);
  opts.T = T;
  opts.dt = dt;
  const PicardResult lag = picard_solve(u0, sc.params, sc.forcing, opts, norms);

  const StateField& ut = lag.states.back();
  StateField pushed = ut;
  pushed.v = enforce_dirichlet(compose_with_map(ut.v, lag.final_map, Direction::inverse));
  pushed.h = compose_with_map(ut.h, lag.final_map, Direction::inverse);
  pushed.a = compose_with_map(ut.a, lag.final_map, Direction::inverse);

  const EulerianTrajectory eul = run_eulerian(u0, sc.params, sc.forcing, lag.T_final, lag.dt, *ops);
  const StateField& ue = eul.states.back();

  CrossCheckLevel lv;
  lv.n = n;
  lv.dt = lag.dt;
  lv.T = lag.T_final;
  lv.omega = lag.omega;
  lv.halvings = lag.halvings;
  lv.iterations = lag.iterations;
  lv.clamp_events = lag.clamp_events;
  const double dv = std::sqrt(weighted_sq(g, pushed.v.x - ue.v.x) + weighted_sq(g, pushed.v.y - ue.v.y));
  const double rv = std::sqrt(weighted_sq(g, ue.v.x) + weighted_sq(g, ue.v.y));
  lv.abs_v = dv;
  lv.rel_v = relative(dv, rv);
  lv.rel_h = relative(l2_norm(g, pushed.h - ue.h), l2_norm(g, ue.h));
  lv.rel_a = relative(l2_norm(g, pushed.a - ue.a), l2_norm(g, ue.a));
  return lv;
}

Eigen::Matrix2d random_strain(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> mag(-3.0, 1.0);
  Eigen::Matrix2d eps;
  const double s = std::pow(10.0, mag(rng));
  eps(0, 0) = s * unit(rng);
  eps(1, 1) = s * unit(rng);
  eps(0, 1) = eps(1, 0) = s * unit(rng);
  return eps;
}

}  // namespace

Profile Profile::sine(double k) {
  Profile p;
  p.kind_ = Kind::sine;
  p.k_ = k;
  return p;
}

Profile Profile::cosine(double k) {
  Profile p;
  p.kind_ = Kind::cosine;
  p.k_ = k;
  return p;
}

Profile Profile::poly(std::vector<double> coeffs) {
  Profile p;
  p.kind_ = Kind::poly;
  p.c_ = std::move(coeffs);
  return p;
}

std::array<double, 3> Profile::eval(double s) const {
  const double w = k_ * pi;
  switch (kind_) {
    case Kind::sine:
      return {std::sin(w * s), w * std::cos(w * s), -w * w * std::sin(w * s)};
    case Kind::cosine:
      return {std::cos(w * s), -w * std::sin(w * s), -w * w * std::cos(w * s)};
    case Kind::poly:
      break;
  }
  std::array<double, 3> out{0, 0, 0};
  for (int n = static_cast<int>(c_.size()) - 1; n >= 0; --n) {
    // Horner on (f, f', f'') simultaneously.
    out[2] = out[2] * s + 2.0 * out[1];
    out[1] = out[1] * s + out[0];
    out[0] = out[0] * s + c_[n];
  }
  return out;
}

AnalyticField& AnalyticField::add(double amp, Profile fx, Profile fy) {
  terms_.push_back({amp, std::move(fx), std::move(fy)});
  return *this;
}

double AnalyticField::value(double x, double y) const {
  double v = 0.0;
  for (const auto& t : terms_) v += t.amp * t.fx.eval(x)[0] * t.fy.eval(y)[0];
  return v;
}

Eigen::Vector2d AnalyticField::grad(double x, double y) const {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (const auto& t : terms_) {
    const auto fx = t.fx.eval(x), fy = t.fy.eval(y);
    g += t.amp * Eigen::Vector2d(fx[1] * fy[0], fx[0] * fy[1]);
  }
  return g;
}

Eigen::Matrix2d AnalyticField::hess(double x, double y) const {
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  for (const auto& t : terms_) {
    const auto fx = t.fx.eval(x), fy = t.fy.eval(y);
    Eigen::Matrix2d m;
    m << fx[2] * fy[0], fx[1] * fy[1], fx[1] * fy[1], fx[0] * fy[2];
    h += t.amp * m;
  }
  return h;
}

ScalarField AnalyticField::sample(const Grid& g) const {
  return hvp::sample(g, [this](double x, double y) { return value(x, y); });
}

StateField AnalyticState::sample(const Grid& g) const {
  StateField u(g, VectorField(v1.sample(g), v2.sample(g)), h.sample(g), a.sample(g));
  u.v = enforce_dirichlet(u.v);
  return u;
}

StateField continuous_operator(const AnalyticState& u1, const AnalyticState& u,
                               const RheologyParams& params, double omega, const Grid& g) {
  StateField out = StateField::zero(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i), y = g.y(j);
      // Frozen coefficients.
      Eigen::Matrix2d gv1;  // gv1(j, n) = d_n v1_j
      gv1.row(0) = u1.v1.grad(x, y).transpose();
      gv1.row(1) = u1.v2.grad(x, y).transpose();
      const Eigen::Matrix2d eps1 = 0.5 * (gv1 + gv1.transpose());
      const double h1 = u1.h.value(x, y), a1 = u1.a.value(x, y);
      const auto ct = coeff_tensor(eps1, h1, a1, params);
      const double dPh = ice_strength_dh(a1, params), dPa = ice_strength_da(h1, a1, params);
      const Eigen::Vector2d gP = dPh * u1.h.grad(x, y) + dPa * u1.a.grad(x, y);

      // Derivatives of u.
      Eigen::Matrix2d gv;
      gv.row(0) = u.v1.grad(x, y).transpose();
      gv.row(1) = u.v2.grad(x, y).transpose();
      const std::array<Eigen::Matrix2d, 2> H{u.v1.hess(x, y), u.v2.hess(x, y)};
      const Eigen::Matrix2d eps = 0.5 * (gv + gv.transpose());
      const Eigen::Matrix2d se = apply_s(eps, params.e);
      const Eigen::Vector2d gh = u.h.grad(x, y), ga = u.a.grad(x, y);
      const double div = gv.trace();

      if (!g.on_boundary(i, j)) {
        const double low = 1.0 / (2.0 * params.rho_ice * h1 * ct.delta_reg);
        const Eigen::Vector2d v(u.v1.value(x, y), u.v2.value(x, y));
        Eigen::Vector2d r;
        for (int ci = 0; ci < 2; ++ci) {
          double ah = 0.0;
          for (int cj = 0; cj < 2; ++cj) {
            for (int k = 0; k < 2; ++k)
              for (int l = 0; l < 2; ++l) ah -= ct.a(2 * ci + cj, 2 * k + l) * H[cj](k, l);
            ah += low * gP(cj) * se(ci, cj);
          }
          const double b1 = (dPh * gh(ci) + dPa * ga(ci)) / (2.0 * params.rho_ice * h1);
          r(ci) = -ah + omega * v(ci) + b1;
        }
        out.v.set(i, j, r);
      }
      out.h(i, j) = h1 * div + omega * u.h.value(x, y);
      out.a(i, j) = a1 * div + omega * u.a.value(x, y);
    }
  return out;
}

RheologyParams mms_params() {
  RheologyParams p;
  p.e = 2.0;
  p.delta = 0.1;
  p.p_star = 1.0;
  p.c_bullet = 2.0;
  p.kappa = 1e-3;
  p.rho_ice = 1.0;
  return p;
}

MmsConfig default_mms(MmsKind kind, Scheme scheme) {
  MmsConfig c;
  c.kind = kind;
  c.scheme = scheme;
  c.params = mms_params();
  switch (kind) {
    case MmsKind::spatial:
      c.T = 0.1;
      break;
    case MmsKind::temporal:
      c.T = 0.5;
      c.steps = {10, 20, 40};
      break;
    case MmsKind::kernel:
      c.scheme = Scheme::trapezoidal;
      c.sizes = {8, 12, 16};
      c.steps = {5, 5, 5};
      c.T = 0.1;
      break;
  }
  return c;
}

std::string mms_kind_name(MmsKind k) {
  switch (k) {
    case MmsKind::spatial: return "spatial";
    case MmsKind::temporal: return "temporal";
    case MmsKind::kernel: return "kernel";
  }
  return "?";
}

ConvergenceTable mms_study(const MmsConfig& cfg) {
  ConvergenceTable table;
  table.kind = cfg.kind;
  table.scheme = cfg.scheme;
  for (std::size_t k = 0; k < cfg.sizes.size(); ++k) {
    const int n = cfg.sizes[k];
    const int steps = k < cfg.steps.size() ? cfg.steps[k] : n - 1;
    table.rows.push_back(run_level(cfg, n, steps));
    spdlog::debug("mms {} n={} steps={} err={:.3e}", mms_kind_name(cfg.kind), n, steps,
                  table.rows.back().err);
  }
  std::vector<double> xs, ys;
  for (const auto& r : table.rows) {
    xs.push_back(cfg.kind == MmsKind::temporal ? r.dt : r.h);
    ys.push_back(r.err);
  }
  for (std::size_t k = 1; k < xs.size(); ++k) {
    table.orders.push_back(std::log(ys[k - 1] / ys[k]) / std::log(xs[k - 1] / xs[k]));
  }
  table.fitted_order = slope(xs, ys);
  return table;
}

double l2_norm(const Grid& g, const ScalarField& f) { return std::sqrt(weighted_sq(g, f)); }

std::vector<CrossCheckLevel> cross_check(const Scenario& sc, double T, const std::vector<int>& sizes,
                                         const std::vector<double>& dts, PicardOptions opts,
                                         double p, double q, int threads) {
  if (sizes.size() != dts.size()) throw ConfigError("cross_check needs one dt per resolution");
  std::vector<CrossCheckLevel> out(sizes.size());
  std::vector<std::exception_ptr> errors(sizes.size());
  auto work = [&](std::size_t k) {
    try {
      out[k] = cross_level(sc, T, sizes[k], dts[k], opts, p, q);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const std::size_t width = static_cast<std::size_t>(std::max(1, threads));
  for (std::size_t start = 0; start < sizes.size(); start += width) {
    std::vector<std::thread> pool;
    for (std::size_t k = start; k < std::min(sizes.size(), start + width); ++k) {
      if (width == 1) {
        work(k);
      } else {
        pool.emplace_back(work, k);
      }
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

IdentityReport rheology_identity_sweep(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> e_dist(1.2, 4.0), logd(-12.0, -1.0), logp(-3.0, 3.0);
  IdentityReport rep;
  rep.samples = samples;
  rep.min_reg_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const double e = e_dist(rng), delta = std::pow(10.0, logd(rng)), P = std::pow(10.0, logp(rng));
    const Eigen::Matrix2d eps = random_strain(rng);
    const double closed = delta_sq(eps, e), quad = delta_sq_quadratic(eps, e);
    rep.max_delta_err = std::max(rep.max_delta_err, std::abs(closed - quad) / std::max(std::abs(quad), 1e-300));
    const Eigen::Matrix2d s1 = stress_sigma(eps, P, delta, e), s2 = stress_sigma_s_form(eps, P, delta, e);
    rep.max_sigma_err = std::max(rep.max_sigma_err, (s1 - s2).norm() / std::max(s2.norm(), 1e-300));
    const double dr = delta_reg(eps, delta, e);
    rep.min_reg_margin = std::min(rep.min_reg_margin, dr - std::sqrt(delta));
    if (!(dr >= std::sqrt(delta))) rep.reg_bound = false;
  }
  return rep;
}

std::vector<SymbolSample> symbol_probe(int samples, int directions, std::uint64_t seed,
                                       const RheologyParams& params) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> hd(2.0 * params.kappa, 5.0), ad(0.05, 0.95);
  std::vector<Eigen::Vector2d> xi(directions);
  for (int d = 0; d < directions; ++d) {
    const double th = pi * d / directions;  // M(-xi) = M(xi)
    xi[d] = {std::cos(th), std::sin(th)};
  }
  std::vector<SymbolSample> out(samples);
  for (auto& s : out) {
    s.h = hd(rng);
    s.a = ad(rng);
    s.eps = random_strain(rng);
    const auto ct = coeff_tensor(s.eps, s.h, s.a, params);
    s.max_eig = -std::numeric_limits<double>::infinity();
    for (const auto& x : xi) {
      const Eigen::Matrix2d m = symbol_matrix<double>(ct.a, x);
      const Eigen::Matrix2d sym = 0.5 * (m + m.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sym, Eigen::EigenvaluesOnly);
      s.max_eig = std::max(s.max_eig, es.eigenvalues().maxCoeff());
    }
  }
  return out;
}

}  // namespace hvp
