#include "hvp/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <string>

#include "hvp/errors.hpp"

namespace hvp {

int step_count(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw DomainError("time horizon and step must be positive");
  return std::max(1, static_cast<int>(std::lround(T / dt)));
}

struct LinearStepper::Impl {
  SpMatCol lhs;
  bool direct = true;
  Eigen::SparseLU<SpMatCol> lu;
  Eigen::BiCGSTAB<SpMatCol, Eigen::IncompleteLUT<double>> krylov;
};

LinearStepper::LinearStepper(const SpMat& op, double dt, Scheme scheme, double rel_tol)
    : impl_(std::make_unique<Impl>()), op_(op), dt_(dt), scheme_(scheme), rel_tol_(rel_tol) {
  if (!(dt > 0.0)) throw DomainError("step size must be positive");
  const double theta = scheme == Scheme::backward_euler ? 1.0 : 0.5;
  SpMatCol id(op_.rows(), op_.cols());
  id.setIdentity();
  impl_->lhs = id + (theta * dt) * op_;
  impl_->lhs.makeCompressed();
  // Heuristic on unknown count: 2(n-2)^2 + 2n^2 at n = 128.
  impl_->direct = op_.rows() <= 2 * 126 * 126 + 2 * 128 * 128;
  if (impl_->direct) {
    impl_->lu.compute(impl_->lhs);
    if (impl_->lu.info() != Eigen::Success) {
      throw SolverError("sparse LU factorization failed: " + impl_->lu.lastErrorMessage());
    }
  } else {
    impl_->krylov.setTolerance(rel_tol_ * 1e-2);
    impl_->krylov.setMaxIterations(2000);
    impl_->krylov.compute(impl_->lhs);
    if (impl_->krylov.info() != Eigen::Success) throw SolverError("ILUT preconditioner setup failed");
  }
}

LinearStepper::~LinearStepper() = default;
LinearStepper::LinearStepper(LinearStepper&&) noexcept = default;
LinearStepper& LinearStepper::operator=(LinearStepper&&) noexcept = default;

Eigen::VectorXd LinearStepper::solve(const Eigen::VectorXd& b) const {
  const double bn = b.norm();
  if (bn == 0.0) {
    last_residual_ = 0.0;
    return Eigen::VectorXd::Zero(b.size());
  }
  Eigen::VectorXd x = impl_->direct ? Eigen::VectorXd(impl_->lu.solve(b))
                                    : Eigen::VectorXd(impl_->krylov.solve(b));
  Eigen::VectorXd r = b - impl_->lhs * x;
  last_residual_ = r.norm() / bn;
  for (int refine = 0; refine < 3 && !(last_residual_ <= rel_tol_); ++refine) {
    x += impl_->direct ? Eigen::VectorXd(impl_->lu.solve(r)) : Eigen::VectorXd(impl_->krylov.solve(r));
    r = b - impl_->lhs * x;
    last_residual_ = r.norm() / bn;
  }
  if (!(last_residual_ <= rel_tol_)) {
    std::string msg = "linear solve residual " + std::to_string(last_residual_) + " above " +
                      std::to_string(rel_tol_);
    if (!impl_->direct) {
      msg += " after " + std::to_string(impl_->krylov.iterations()) + " BiCGSTAB iterations";
    }
    throw SolverError(msg);
  }
  return x;
}

Eigen::VectorXd LinearStepper::step(const Eigen::VectorXd& u_n, const Eigen::VectorXd& f_n,
                                    const Eigen::VectorXd& f_np1) const {
  if (scheme_ == Scheme::backward_euler) return solve(u_n + dt_ * f_np1);
  return solve(u_n - (0.5 * dt_) * (op_ * u_n) + (0.5 * dt_) * (f_n + f_np1));
}

Eigen::VectorXd step_linear(const SpMat& op, const Eigen::VectorXd& u_n, const Eigen::VectorXd& f_n,
                            const Eigen::VectorXd& f_np1, double dt, Scheme scheme) {
  return LinearStepper(op, dt, scheme).step(u_n, f_n, f_np1);
}

namespace {

void finish(LinearTrajectory& traj, const NormSuite& norms) {
  traj.e1 = e1_norm(norms, traj.states, traj.dt);
  traj.sup_trace_dev = 0.0;
  for (const auto& s : traj.states) {
    traj.sup_trace_dev = std::max(traj.sup_trace_dev, norms.xgamma(s - traj.states.front()));
  }
}

}  // namespace

LinearTrajectory solve_reference(const StateField& u0, const RheologyParams& params, double T,
                                 double dt, double omega, const NormSuite& norms) {
  if (!validate_state(u0, params).in_V) throw DomainError("reference solution needs u0 in V");
  const DiscreteOperator op = assemble_operator_matrix(u0, norms.ops(), params, omega);
  const int n = step_count(T, dt);
  LinearTrajectory traj;
  traj.omega = omega;
  traj.dt = T / n;
  const LinearStepper stepper(op.matrix, traj.dt, Scheme::backward_euler);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(op.layout.size());
  Eigen::VectorXd x = op.layout.pack(u0);
  traj.times.push_back(0.0);
  traj.states.push_back(u0);
  for (int k = 0; k < n; ++k) {
    x = stepper.step(x, zero, zero);
    traj.residuals.push_back(stepper.last_residual());
    traj.times.push_back((k + 1) * traj.dt);
    traj.states.push_back(op.layout.unpack(x));
  }
  finish(traj, norms);
  return traj;
}

LinearTrajectory solve_linear_ivp(const DiscreteOperator& op, const StateField& u0,
                                  const RhsSeries& rhs, double T, double dt, Scheme scheme,
                                  const NormSuite& norms) {
  const int n = step_count(T, dt);
  if (static_cast<int>(rhs.size()) != n + 1) {
    throw DomainError("right-hand side must be sampled at all " + std::to_string(n + 1) +
                      " time nodes");
  }
  LinearTrajectory traj;
  traj.omega = op.omega;
  traj.dt = T / n;
  const LinearStepper stepper(op.matrix, traj.dt, scheme);
  Eigen::VectorXd x = op.layout.pack(u0);
  traj.times.push_back(0.0);
  traj.states.push_back(u0);
  for (int k = 0; k < n; ++k) {
    x = stepper.step(x, rhs[k], rhs[k + 1]);
    traj.residuals.push_back(stepper.last_residual());
    traj.times.push_back((k + 1) * traj.dt);
    traj.states.push_back(op.layout.unpack(x));
  }
  finish(traj, norms);
  std::vector<StateField> f;
  f.reserve(rhs.size());
  for (const auto& r : rhs) f.push_back(op.layout.unpack(r));
  const double denom = bochner_norm(norms, f, traj.dt, Space::X0) + norms.xgamma(u0);
  traj.mr_quotient = denom > 0.0 ? traj.e1 / denom : 0.0;
  return traj;
}

}  // namespace hvp
