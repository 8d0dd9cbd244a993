#include "hvp/norms.hpp"

#include <algorithm>
#include <cmath>

#include "hvp/errors.hpp"

namespace hvp {

NormSuite::NormSuite(const Grid& grid, double p, double q)
    : NormSuite(std::make_shared<const DiffOps>(grid), p, q) {}

NormSuite::NormSuite(std::shared_ptr<const DiffOps> ops, double p, double q)
    : ops_(std::move(ops)), p_(p), q_(q) {
  if (!(p_ >= 1.0) || !(q_ >= 1.0)) throw ConfigError("norm exponents must be >= 1");
  const Grid& g = ops_->grid();
  weights_.resize(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double wx = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
      const double wy = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
      weights_(i, j) = wx * wy * g.dx * g.dy;
    }
}

double lr_sum(const std::vector<double>& parts, double r) {
  double m = 0.0;
  for (double x : parts) m = std::max(m, std::abs(x));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double x : parts) s += std::pow(std::abs(x) / m, r);
  return m * std::pow(s, 1.0 / r);
}

double NormSuite::lq(const ScalarField& f) const {
  const double m = f.abs().maxCoeff();
  if (m == 0.0) return 0.0;
  const double s = (weights_ * (f.abs() / m).pow(q_)).sum();
  return m * std::pow(s, 1.0 / q_);
}

double NormSuite::w1q(const ScalarField& f) const {
  return lr_sum({lq(f), lq(apply(ops_->d(0), f)), lq(apply(ops_->d(1), f))}, q_);
}

double NormSuite::w2q(const ScalarField& f) const {
  return lr_sum({lq(f), lq(apply(ops_->d(0), f)), lq(apply(ops_->d(1), f)),
                 lq(apply(ops_->dd(0, 0), f)), lq(apply(ops_->dd(0, 1), f)),
                 lq(apply(ops_->dd(1, 1), f))},
                q_);
}

double NormSuite::norm(const StateField& u, Space s) const {
  auto vel = [&](const ScalarField& f) {
    switch (s) {
      case Space::X0: return lq(f);
      case Space::X1: return w2q(f);
      case Space::Xgamma: return w1q(f);
    }
    return 0.0;
  };
  return lr_sum({vel(u.v.x), vel(u.v.y), w1q(u.h), w1q(u.a)}, q_);
}

double bochner_norm(const NormSuite& ns, const std::vector<StateField>& traj, double dt, Space s,
                    double p) {
  if (traj.empty()) return 0.0;
  std::vector<double> parts;
  parts.reserve(traj.size());
  const std::size_t last = traj.size() - 1;
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const double w = (last == 0) ? 1.0 : ((n == 0 || n == last) ? 0.5 : 1.0);
    parts.push_back(std::pow(w * dt, 1.0 / p) * ns.norm(traj[n], s));
  }
  return lr_sum(parts, p);
}

double bochner_norm(const NormSuite& ns, const std::vector<StateField>& traj, double dt, Space s) {
  return bochner_norm(ns, traj, dt, s, ns.p());
}

double e1_norm(const NormSuite& ns, const std::vector<StateField>& traj, double dt) {
  std::vector<double> parts;
  const double p = ns.p();
  const double wt = std::pow(dt, 1.0 / p);
  for (std::size_t n = 0; n + 1 < traj.size(); ++n) {
    parts.push_back(wt * ns.x0((1.0 / dt) * (traj[n + 1] - traj[n])));
    parts.push_back(wt * ns.x1(traj[n]));
  }
  return lr_sum(parts, p);
}

}  // namespace hvp
