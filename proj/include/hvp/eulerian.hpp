#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hvp/errors.hpp"
#include "hvp/fields.hpp"
#include "hvp/stencils.hpp"

namespace hvp {

/// Step rejected because |v| dt / dx exceeds the limit.
class CflViolation : public Error {
 public:
  CflViolation(const std::string& what, double cfl, double suggested_dt)
      : Error(what), cfl_(cfl), suggested_dt_(suggested_dt) {}
  double cfl() const { return cfl_; }
  double suggested_dt() const { return suggested_dt_; }

 private:
  double cfl_;
  double suggested_dt_;
};

/// Switches for the split sub-steps (all on for the physical model).
struct EulerianOptions {
  bool advection = true;
  bool stress = true;
  bool coriolis = true;
  bool drag = true;
  bool height = true;
  bool sources = true;
  double cfl_max = 0.5;
};

/// Mass-weighted momentum sum_p w_p rho h_p v_p and the impulse of each
/// explicit or implicit sub-step over one step.
struct MomentumBudget {
  Eigen::Vector2d before = Eigen::Vector2d::Zero();
  Eigen::Vector2d after = Eigen::Vector2d::Zero();
  Eigen::Vector2d advection = Eigen::Vector2d::Zero();
  Eigen::Vector2d stress = Eigen::Vector2d::Zero();
  Eigen::Vector2d coriolis = Eigen::Vector2d::Zero();
  Eigen::Vector2d drag = Eigen::Vector2d::Zero();
  Eigen::Vector2d height = Eigen::Vector2d::Zero();
};

struct EulerianStep {
  StateField u;
  double cfl = 0.0;
  MomentumBudget budget;
};

/// One split step: (i) explicit first-order upwind advection of v and
/// conservative upwind transport of h and a; (ii) implicit stress divergence
/// with viscosities lagged at the advected state; (iii) explicit Coriolis,
/// sea-surface tilt, drag and thermodynamic sources.
/// Throws CflViolation when max |v| dt / min(dx, dy) > cfl_max.
EulerianStep step_eulerian(const StateField& u_n, const RheologyParams& params,
                           const ForcingFields& forcing, double dt, double t, const DiffOps& ops,
                           const EulerianOptions& opts = {});

struct EulerianTrajectory {
  std::vector<double> times;
  std::vector<StateField> states;
  std::vector<double> cfl;
  std::vector<AdmissibilityReport> admissibility;
};

EulerianTrajectory run_eulerian(const StateField& u0, const RheologyParams& params,
                                const ForcingFields& forcing, double T, double dt,
                                const DiffOps& ops, const EulerianOptions& opts = {});

/// sum_p w_p rho h_p v_p with trapezoidal node weights.
Eigen::Vector2d total_momentum(const StateField& u, const RheologyParams& params);

}  // namespace hvp
