#pragma once

#include <limits>
#include <string>
#include <vector>

#include "hvp/lagrangian.hpp"
#include "hvp/linear_solver.hpp"
#include "hvp/nonlinear.hpp"
#include "hvp/norms.hpp"

namespace hvp {

struct PicardOptions {
  double T = 0.1;
  double dt = 1e-3;
  double tol = 1e-8;
  int kmax = 40;
  int max_halvings = 6;
  double det_floor = 0.25;
  /// NaN selects omega by the doubling sector test.
  double omega = std::numeric_limits<double>::quiet_NaN();
  /// Consecutive ratios >= 1 that trigger a restart with T / 2.
  int divergence_streak = 3;
};

struct IterationRecord {
  int attempt = 0;
  double T = 0.0;
  int k = 0;
  double delta = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double sup_dev = 0.0;
  double min_det = 1.0;
  double sup_inv_dev = 0.0;
  double margin_h = 0.0;
  double margin_a = 0.0;
};

struct PicardResult {
  std::vector<double> times;
  std::vector<StateField> states;  ///< u~ at every time node
  std::vector<FlowHealth> health;  ///< flow map health at every time node
  std::vector<AdmissibilityReport> admissibility;
  FlowMap final_map;  ///< X(T, .) of the accepted solution
  LinearTrajectory reference;
  std::vector<double> deltas;  ///< delta_k, k = 1, 2, ...
  std::vector<double> ratios;  ///< r_k = delta_{k+1} / delta_k
  std::vector<IterationRecord> log;
  double omega = 0.0;
  double T_final = 0.0;
  double dt = 0.0;
  int halvings = 0;
  int iterations = 0;
  double u1_norm = 0.0;  ///< ||u_hat^(1)||_E1
  int clamp_events = 0;
  std::string termination;

  double max_ratio() const;
};

/// Fixed-point iteration u_hat^(k+1) = L^{-1} F(u_hat^(k) + u0*) with the
/// operator matrix frozen at u0 and backward-Euler time stepping.
///
/// Throws BlowupSignal when an iterate leaves V, InvertibilityLost when the
/// flow map fails the 1/2 test after the last halving, and NoConvergence
/// after kmax iterations.
PicardResult picard_solve(const StateField& u0, const RheologyParams& params,
                          const ForcingFields& forcing, const PicardOptions& opts,
                          const NormSuite& norms);

struct DependenceRow {
  double s = 0.0;
  double diff_e1 = 0.0;   ///< ||u~(u0 + s phi) - u~(u0)||_E1
  double pert_norm = 0.0; ///< ||s phi||_{X_gamma proxy}
  double ratio = 0.0;
};

/// Smooth perturbation profile: zero velocity on the boundary.
StateField dependence_profile(const Grid& grid);

/// Runs the base and perturbed solves (concurrently, up to `threads`) with a
/// common omega.
std::vector<DependenceRow> dependence_experiment(const StateField& u0,
                                                 const std::vector<double>& sizes,
                                                 const RheologyParams& params,
                                                 const ForcingFields& forcing, PicardOptions opts,
                                                 const NormSuite& norms, int threads = 1);

}  // namespace hvp
