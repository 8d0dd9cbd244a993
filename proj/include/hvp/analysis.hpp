#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hvp/fields.hpp"
#include "hvp/linear_solver.hpp"
#include "hvp/picard.hpp"
#include "hvp/scenario.hpp"

namespace hvp {

/// 1D profile with closed-form first and second derivatives:
/// sin(k pi s), cos(k pi s) or a polynomial sum c_n s^n.
class Profile {
 public:
  static Profile sine(double k);
  static Profile cosine(double k);
  static Profile poly(std::vector<double> coeffs);
  static Profile one() { return poly({1.0}); }
  /// (f, f', f'').
  std::array<double, 3> eval(double s) const;

 private:
  enum class Kind { sine, cosine, poly } kind_ = Kind::poly;
  double k_ = 0.0;
  std::vector<double> c_;
};

/// Sum of separable terms amp * fx(x) fy(y).
class AnalyticField {
 public:
  AnalyticField() = default;
  AnalyticField& add(double amp, Profile fx, Profile fy);
  AnalyticField& add_constant(double c) { return add(c, Profile::one(), Profile::one()); }
  double value(double x, double y) const;
  Eigen::Vector2d grad(double x, double y) const;
  Eigen::Matrix2d hess(double x, double y) const;
  ScalarField sample(const Grid& g) const;

 private:
  struct Term {
    double amp;
    Profile fx, fy;
  };
  std::vector<Term> terms_;
};

struct AnalyticState {
  AnalyticField v1, v2, h, a;
  StateField sample(const Grid& g) const;
};

/// Continuous operator matrix applied to u, frozen at u1, evaluated at the
/// nodes with exact derivatives (velocity rows zero on the boundary).
StateField continuous_operator(const AnalyticState& u1, const AnalyticState& u,
                               const RheologyParams& params, double omega, const Grid& g);

enum class MmsKind { spatial, temporal, kernel };

struct MmsConfig {
  MmsKind kind = MmsKind::spatial;
  Scheme scheme = Scheme::trapezoidal;
  std::vector<int> sizes{16, 32, 64};
  /// Time steps per level; spatial studies use n - 1 steps so dt ~ dx.
  std::vector<int> steps{};
  double T = 0.1;
  double omega = 1.0;
  RheologyParams params;
};

/// Coefficients of the manufactured problems (moderate delta and strength).
RheologyParams mms_params();
MmsConfig default_mms(MmsKind kind, Scheme scheme);

struct MmsRow {
  int n = 0;
  double h = 0.0;   ///< dx
  double dt = 0.0;
  double err = 0.0;  ///< max-norm error of the stacked state at T
  double err_v = 0.0, err_h = 0.0, err_a = 0.0;
  double scale = 0.0;  ///< max-norm of the exact state at T
};

struct ConvergenceTable {
  MmsKind kind = MmsKind::spatial;
  Scheme scheme = Scheme::trapezoidal;
  std::vector<MmsRow> rows;
  std::vector<double> orders;  ///< between consecutive rows, w.r.t. dx (spatial) or dt
  double fitted_order = 0.0;   ///< least-squares slope over all rows
};

/// Spatial study: forcing d/dt u_ex + A u_ex with the continuous operator,
/// u_ex linear in time. Temporal study: forcing with the discrete operator so
/// only the time error remains. Kernel study: biquadratic velocity and
/// bilinear h, a frozen at polynomial data, where the stencils are exact.
ConvergenceTable mms_study(const MmsConfig& cfg);

std::string mms_kind_name(MmsKind k);

/// Trapezoid-weighted L2 norm on the grid.
double l2_norm(const Grid& g, const ScalarField& f);

struct CrossCheckLevel {
  int n = 0;
  double dt = 0.0;
  double T = 0.0;        ///< horizon reached by the Lagrangian run
  double rel_v = 0.0;    ///< ||v_L - v_E|| / ||v_E||, absolute when v_E = 0
  double rel_h = 0.0;
  double rel_a = 0.0;
  double abs_v = 0.0;
  double omega = 0.0;
  int halvings = 0;
  int iterations = 0;
  int clamp_events = 0;
};

/// Lagrangian solve pushed forward through Y(T, .) against the Eulerian
/// reference on the same data, one level per (n, dt) pair.
std::vector<CrossCheckLevel> cross_check(const Scenario& sc, double T, const std::vector<int>& sizes,
                                         const std::vector<double>& dts, PicardOptions opts,
                                         double p = 8.0, double q = 8.0, int threads = 1);

struct IdentityReport {
  int samples = 0;
  double max_delta_err = 0.0;   ///< closed form vs eps^T S eps, relative
  double max_sigma_err = 0.0;   ///< viscosity form vs S form, relative
  double min_reg_margin = 0.0;  ///< min (Delta_delta - sqrt(delta))
  bool reg_bound = true;        ///< Delta_delta >= sqrt(delta) everywhere
};

/// Seeded random strains, ice states and parameters.
IdentityReport rheology_identity_sweep(int samples, std::uint64_t seed);

struct SymbolSample {
  double h = 0.0, a = 0.0;
  Eigen::Matrix2d eps = Eigen::Matrix2d::Zero();
  double max_eig = 0.0;  ///< max over directions of the top eigenvalue of sym M(xi)
};

/// Admissible samples (h in [2 kappa, 5], a in [0.05, 0.95], strain entries
/// of magnitude 1e-3..10) with `directions` unit directions each.
std::vector<SymbolSample> symbol_probe(int samples, int directions, std::uint64_t seed,
                                       const RheologyParams& params);

}  // namespace hvp
