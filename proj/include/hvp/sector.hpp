#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hvp/fields.hpp"
#include "hvp/stencils.hpp"

namespace hvp {

struct SectorEntry {
  double omega = 0.0;
  double min_re = 0.0;   ///< min Re(lambda + omega)
  double max_arg = 0.0;  ///< max |arg(lambda + omega)|
  bool pass = false;
};

struct SectorReport {
  Eigen::VectorXcd spectrum;  ///< eigenvalues of the unshifted operator
  std::vector<SectorEntry> entries;
  double angle_limit = 0.0;  ///< pi/2 - margin
  /// Smallest passing omega of the grid; NaN when none passes.
  double chosen_omega = 0.0;
};

/// Dense eigenvalues; throws SolverError on failure or non-finite output.
Eigen::VectorXcd dense_spectrum(const SpMat& op);

/// Sector test of op + omega for every omega in the grid: all eigenvalues
/// with Re > 0 and |arg| < pi/2 - margin.
SectorReport sector_probe(const SpMat& op, const std::vector<double>& omega_grid,
                          double margin = 0.05);
SectorReport sector_probe(const Eigen::VectorXcd& spectrum, const std::vector<double>& omega_grid,
                          double margin = 0.05);

/// Bilinear resampling of a state onto another grid covering the same rectangle.
StateField resample(const StateField& u, const Grid& target);

struct OmegaSelection {
  double omega = 0.0;
  SectorReport report;
};

/// Start at omega = 1 and double until the sector test passes for the
/// operator matrix frozen at u resampled to an n x n proxy grid.
OmegaSelection select_omega(const StateField& u, const RheologyParams& params, int proxy_n = 8,
                            double margin = 0.05, int max_doublings = 40);

}  // namespace hvp
