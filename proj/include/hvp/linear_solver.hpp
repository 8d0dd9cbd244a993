#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <functional>
#include <memory>
#include <vector>

#include "hvp/norms.hpp"
#include "hvp/operators.hpp"

namespace hvp {

enum class Scheme { backward_euler, trapezoidal };

/// Number of uniform steps covering [0, T]: max(1, round(T / dt)).
int step_count(double T, double dt);

/// Solver for (I + theta dt A) x = b with one factorization reused for
/// every step. Direct LU up to 128^2 grid nodes, preconditioned BiCGSTAB beyond.
class LinearStepper {
 public:
  LinearStepper(const SpMat& op, double dt, Scheme scheme, double rel_tol = 1e-10);
  ~LinearStepper();
  LinearStepper(LinearStepper&&) noexcept;
  LinearStepper& operator=(LinearStepper&&) noexcept;

  /// backward Euler: (I + dt A) u' = u + dt f_np1;
  /// trapezoidal:    (I + dt/2 A) u' = (I - dt/2 A) u + dt/2 (f_n + f_np1).
  Eigen::VectorXd step(const Eigen::VectorXd& u_n, const Eigen::VectorXd& f_n,
                       const Eigen::VectorXd& f_np1) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  double dt() const { return dt_; }
  Scheme scheme() const { return scheme_; }
  double last_residual() const { return last_residual_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  SpMatCol op_;
  double dt_;
  Scheme scheme_;
  double rel_tol_;
  mutable double last_residual_ = 0.0;
};

/// One step with a fresh factorization.
Eigen::VectorXd step_linear(const SpMat& op, const Eigen::VectorXd& u_n, const Eigen::VectorXd& f_n,
                            const Eigen::VectorXd& f_np1, double dt, Scheme scheme);

struct LinearTrajectory {
  std::vector<double> times;
  std::vector<StateField> states;
  std::vector<double> residuals;
  double omega = 0.0;
  double dt = 0.0;
  double e1 = 0.0;            ///< discrete E1 norm of the trajectory
  double sup_trace_dev = 0.0; ///< max_n ||u_n - u_0||_{X_gamma proxy}
  double mr_quotient = 0.0;   ///< ||u||_E1 / (||f||_E0 + ||u0||_gamma), 0 for 0/0
};

/// Homogeneous frozen problem d/dt u + A(u0) u = 0, u(0) = u0, backward Euler.
/// Throws DomainError when u0 is not in V.
LinearTrajectory solve_reference(const StateField& u0, const RheologyParams& params, double T,
                                 double dt, double omega, const NormSuite& norms);

/// Right-hand side sampled at the time nodes t_n = n dt, n = 0..N.
using RhsSeries = std::vector<Eigen::VectorXd>;

LinearTrajectory solve_linear_ivp(const DiscreteOperator& op, const StateField& u0,
                                  const RhsSeries& rhs, double T, double dt, Scheme scheme,
                                  const NormSuite& norms);

}  // namespace hvp
