#pragma once

#include <memory>
#include <vector>

#include "hvp/fields.hpp"
#include "hvp/stencils.hpp"

namespace hvp {

enum class Space { X0, X1, Xgamma };

/// Discrete norms with trapezoidal node weights.
///
/// X0 = L^q x W^{1,q} x W^{1,q}, X1 = W^{2,q} x W^{1,q} x W^{1,q} and the
/// trace proxy W^{1,q} x W^{1,q} x W^{1,q}; component norms are combined as
/// an l^q sum. Derivatives are taken at all nodes with the DiffOps stencils.
class NormSuite {
 public:
  NormSuite(const Grid& grid, double p = 8.0, double q = 8.0);
  NormSuite(std::shared_ptr<const DiffOps> ops, double p = 8.0, double q = 8.0);

  double p() const { return p_; }
  double q() const { return q_; }
  const Grid& grid() const { return ops_->grid(); }
  const DiffOps& ops() const { return *ops_; }

  double lq(const ScalarField& f) const;
  double w1q(const ScalarField& f) const;
  double w2q(const ScalarField& f) const;
  double norm(const StateField& u, Space s) const;
  double x0(const StateField& u) const { return norm(u, Space::X0); }
  double x1(const StateField& u) const { return norm(u, Space::X1); }
  double xgamma(const StateField& u) const { return norm(u, Space::Xgamma); }

 private:
  std::shared_ptr<const DiffOps> ops_;
  double p_;
  double q_;
  ScalarField weights_;
};

/// l^r combination (sum |x_k|^r)^{1/r}, computed with max scaling.
double lr_sum(const std::vector<double>& parts, double r);

/// (sum_n w_n dt ||u_n||^p)^{1/p} with trapezoidal weights w_n.
double bochner_norm(const NormSuite& ns, const std::vector<StateField>& traj, double dt, Space s,
                    double p);
double bochner_norm(const NormSuite& ns, const std::vector<StateField>& traj, double dt, Space s);

/// (sum_{n<N} dt (||(u_{n+1} - u_n)/dt||_X0^p + ||u_n||_X1^p))^{1/p}.
double e1_norm(const NormSuite& ns, const std::vector<StateField>& traj, double dt);

}  // namespace hvp
