#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>

#include "hvp/thermo.hpp"

namespace hvp {

/// Uniform collocated node grid on the rectangle [x0, x0+lx] x [y0, y0+ly].
///
/// Node (i, j) sits at (x0 + i dx, y0 + j dy); the flat index is i + nx j,
/// which is the storage order of a column-major (nx, ny) Eigen array.
struct Grid {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;

  Grid() = default;
  Grid(int nx, int ny, double lx, double ly, double x0 = 0.0, double y0 = 0.0);
  static Grid unit_square(int n) { return Grid(n, n, 1.0, 1.0); }

  double lx() const { return dx * (nx - 1); }
  double ly() const { return dy * (ny - 1); }
  double x(int i) const { return x0 + i * dx; }
  double y(int j) const { return y0 + j * dy; }
  int size() const { return nx * ny; }
  int index(int i, int j) const { return i + nx * j; }
  bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == nx - 1 || j == ny - 1; }
  int interior_size() const { return (nx - 2) * (ny - 2); }
  /// True on exactly the outermost node ring.
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> boundary_mask() const;

  bool operator==(const Grid& o) const;
};

using ScalarField = Eigen::ArrayXXd;

struct VectorField {
  ScalarField x;
  ScalarField y;

  VectorField() = default;
  VectorField(ScalarField x_, ScalarField y_) : x(std::move(x_)), y(std::move(y_)) {}
  static VectorField zero(const Grid& g) {
    return {ScalarField::Zero(g.nx, g.ny), ScalarField::Zero(g.nx, g.ny)};
  }
  Eigen::Vector2d at(int i, int j) const { return {x(i, j), y(i, j)}; }
  void set(int i, int j, const Eigen::Vector2d& w) {
    x(i, j) = w.x();
    y(i, j) = w.y();
  }
};

/// Grid-sampled triple u = (v, h, a).
struct StateField {
  Grid grid;
  VectorField v;
  ScalarField h;
  ScalarField a;

  StateField() = default;
  StateField(Grid g, VectorField v_, ScalarField h_, ScalarField a_);
  static StateField zero(const Grid& g);
  /// Throws CorruptState on shape mismatch or non-finite entries.
  void check() const;
};

StateField operator+(const StateField& a, const StateField& b);
StateField operator-(const StateField& a, const StateField& b);
StateField operator*(double s, const StateField& u);

struct RheologyParams {
  double rho_ice = 1.0;
  double e = 2.0;
  double delta = 2e-9;
  double p_star = 1.0;
  double c_bullet = 20.0;
  double kappa = 1e-3;
  double c_cor = 0.0;
  double g = 0.0;
  double rho_atm = 0.0;
  double C_atm = 0.0;
  double rho_ocn = 0.0;
  double C_ocn = 0.0;
  Eigen::Matrix2d R_atm = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d R_ocn = Eigen::Matrix2d::Identity();

  static Eigen::Matrix2d rotation(double angle);
  /// Throws ConfigError naming every violated constraint.
  void validate() const;
};

/// Wind, ocean current and sea-surface height gradient as functions of
/// (t, x, y), plus the growth rate.
struct ForcingFields {
  using VectorFn = std::function<Eigen::Vector2d(double, double, double)>;

  VectorFn V_atm;
  VectorFn V_ocn;
  VectorFn grad_H;
  GrowthRate f_gr;
  /// When set, the callables ignore (x, y) and composition with a flow map is skipped.
  bool spatially_constant = true;

  static ForcingFields none();
};

struct AdmissibilityReport {
  double min_h = 0.0;
  double min_a = 0.0;
  double max_a = 0.0;
  double margin_h = 0.0;  ///< min h - kappa
  double margin_a = 0.0;  ///< min(min a, 1 - max a)
  bool in_V = false;
};

/// Membership in V = {h > kappa, 0 < a < 1}; throws CorruptState on non-finite data.
AdmissibilityReport validate_state(const StateField& u, const RheologyParams& params);

VectorField enforce_dirichlet(const VectorField& v);

/// Sample f(x, y) at every node.
ScalarField sample(const Grid& g, const std::function<double(double, double)>& f);
VectorField sample(const Grid& g, const std::function<Eigen::Vector2d(double, double)>& f);

}  // namespace hvp
