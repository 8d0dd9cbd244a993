#include "hvp/sector.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "hvp/errors.hpp"
#include "hvp/lagrangian.hpp"
#include "hvp/operators.hpp"

namespace hvp {

Eigen::VectorXcd dense_spectrum(const SpMat& op) {
  const Eigen::MatrixXd dense(op);
  Eigen::EigenSolver<Eigen::MatrixXd> es(dense, false);
  if (es.info() != Eigen::Success) throw SolverError("dense eigensolve did not converge");
  Eigen::VectorXcd lambda = es.eigenvalues();
  if (!lambda.allFinite()) throw SolverError("dense eigensolve produced non-finite eigenvalues");
  return lambda;
}

SectorReport sector_probe(const Eigen::VectorXcd& spectrum, const std::vector<double>& omega_grid,
                          double margin) {
  SectorReport rep;
  rep.spectrum = spectrum;
  rep.angle_limit = std::numbers::pi / 2 - margin;
  rep.chosen_omega = std::numeric_limits<double>::quiet_NaN();
  for (double omega : omega_grid) {
    SectorEntry e;
    e.omega = omega;
    e.min_re = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < spectrum.size(); ++k) {
      const std::complex<double> z = spectrum(k) + omega;
      e.min_re = std::min(e.min_re, z.real());
      e.max_arg = std::max(e.max_arg, std::abs(std::arg(z)));
    }
    e.pass = e.min_re > 0.0 && e.max_arg < rep.angle_limit;
    if (e.pass && std::isnan(rep.chosen_omega)) rep.chosen_omega = omega;
    rep.entries.push_back(e);
  }
  return rep;
}

SectorReport sector_probe(const SpMat& op, const std::vector<double>& omega_grid, double margin) {
  return sector_probe(dense_spectrum(op), omega_grid, margin);
}

StateField resample(const StateField& u, const Grid& target) {
  auto rs = [&](const ScalarField& f) {
    ScalarField out(target.nx, target.ny);
    for (int j = 0; j < target.ny; ++j)
      for (int i = 0; i < target.nx; ++i) out(i, j) = interpolate(u.grid, f, target.x(i), target.y(j));
    return out;
  };
  return {target, enforce_dirichlet({rs(u.v.x), rs(u.v.y)}), rs(u.h), rs(u.a)};
}

OmegaSelection select_omega(const StateField& u, const RheologyParams& params, int proxy_n,
                            double margin, int max_doublings) {
  const Grid proxy(proxy_n, proxy_n, u.grid.lx(), u.grid.ly(), u.grid.x0, u.grid.y0);
  const StateField up = resample(u, proxy);
  const DiffOps ops(proxy);
  const DiscreteOperator op = assemble_operator_matrix(up, ops, params, 0.0);
  const Eigen::VectorXcd spectrum = dense_spectrum(op.matrix);
  std::vector<double> grid;
  double omega = 1.0;
  for (int k = 0; k <= max_doublings; ++k, omega *= 2.0) grid.push_back(omega);
  OmegaSelection sel;
  sel.report = sector_probe(spectrum, grid, margin);
  if (std::isnan(sel.report.chosen_omega)) {
    throw SolverError("omega selection: no shift up to 2^" + std::to_string(max_doublings) +
                      " passes the sector test");
  }
  sel.omega = sel.report.chosen_omega;
  return sel;
}

}  // namespace hvp
