#include "hvp/fields.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "hvp/errors.hpp"

namespace hvp {

Grid::Grid(int nx_, int ny_, double lx, double ly, double x0_, double y0_)
    : nx(nx_), ny(ny_), x0(x0_), y0(y0_) {
  if (nx < 4 || ny < 4) throw ConfigError("grid needs at least 4 nodes per axis");
  if (!(lx > 0.0) || !(ly > 0.0)) throw ConfigError("grid extents must be positive");
  dx = lx / (nx - 1);
  dy = ly / (ny - 1);
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> Grid::boundary_mask() const {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> m(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) m(i, j) = on_boundary(i, j);
  return m;
}

bool Grid::operator==(const Grid& o) const {
  return nx == o.nx && ny == o.ny && dx == o.dx && dy == o.dy && x0 == o.x0 && y0 == o.y0;
}

StateField::StateField(Grid g, VectorField v_, ScalarField h_, ScalarField a_)
    : grid(g), v(std::move(v_)), h(std::move(h_)), a(std::move(a_)) {}

StateField StateField::zero(const Grid& g) {
  return {g, VectorField::zero(g), ScalarField::Zero(g.nx, g.ny), ScalarField::Zero(g.nx, g.ny)};
}

void StateField::check() const {
  auto shaped = [&](const ScalarField& f) { return f.rows() == grid.nx && f.cols() == grid.ny; };
  if (!shaped(v.x) || !shaped(v.y) || !shaped(h) || !shaped(a)) {
    throw CorruptState("state arrays do not match the grid shape");
  }
  if (!v.x.allFinite() || !v.y.allFinite() || !h.allFinite() || !a.allFinite()) {
    throw CorruptState("state contains non-finite values");
  }
}

StateField operator+(const StateField& a, const StateField& b) {
  return {a.grid, {a.v.x + b.v.x, a.v.y + b.v.y}, a.h + b.h, a.a + b.a};
}

StateField operator-(const StateField& a, const StateField& b) {
  return {a.grid, {a.v.x - b.v.x, a.v.y - b.v.y}, a.h - b.h, a.a - b.a};
}

StateField operator*(double s, const StateField& u) {
  return {u.grid, {s * u.v.x, s * u.v.y}, s * u.h, s * u.a};
}

Eigen::Matrix2d RheologyParams::rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

void RheologyParams::validate() const {
  std::vector<std::string> bad;
  if (!(rho_ice > 0.0)) bad.emplace_back("rho_ice > 0");
  if (!(e > 1.0)) bad.emplace_back("e > 1");
  if (!(delta > 0.0)) bad.emplace_back("delta > 0");
  if (!(p_star > 0.0)) bad.emplace_back("p_star > 0");
  if (!(c_bullet > 0.0)) bad.emplace_back("c_bullet > 0");
  if (!(kappa > 0.0)) bad.emplace_back("kappa > 0");
  if (!(c_cor >= 0.0)) bad.emplace_back("c_cor >= 0");
  if (!(g >= 0.0)) bad.emplace_back("g >= 0");
  if (!(rho_atm >= 0.0 && C_atm >= 0.0 && rho_ocn >= 0.0 && C_ocn >= 0.0)) {
    bad.emplace_back("rho_atm, C_atm, rho_ocn, C_ocn >= 0");
  }
  for (const auto* r : {&R_atm, &R_ocn}) {
    const double orth = (r->transpose() * *r - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();
    if (!(orth <= 1e-12) || !(std::abs(r->determinant() - 1.0) <= 1e-12)) {
      bad.emplace_back("rotation matrices orthogonal with determinant 1");
      break;
    }
  }
  if (!bad.empty()) {
    std::string msg = "invalid rheology parameters:";
    for (const auto& b : bad) msg += " [" + b + "]";
    throw ConfigError(msg);
  }
}

ForcingFields ForcingFields::none() {
  ForcingFields f;
  auto zero = [](double, double, double) { return Eigen::Vector2d::Zero().eval(); };
  f.V_atm = zero;
  f.V_ocn = zero;
  f.grad_H = zero;
  f.f_gr = GrowthRate::zero();
  f.spatially_constant = true;
  return f;
}

AdmissibilityReport validate_state(const StateField& u, const RheologyParams& params) {
  u.check();
  AdmissibilityReport r;
  r.min_h = u.h.minCoeff();
  r.min_a = u.a.minCoeff();
  r.max_a = u.a.maxCoeff();
  r.margin_h = r.min_h - params.kappa;
  r.margin_a = std::min(r.min_a, 1.0 - r.max_a);
  r.in_V = r.min_h > params.kappa && r.min_a > 0.0 && r.max_a < 1.0;
  return r;
}

VectorField enforce_dirichlet(const VectorField& v) {
  VectorField out = v;
  const Eigen::Index nx = v.x.rows(), ny = v.x.cols();
  for (auto* f : {&out.x, &out.y}) {
    f->row(0).setZero();
    f->row(nx - 1).setZero();
    f->col(0).setZero();
    f->col(ny - 1).setZero();
  }
  return out;
}

ScalarField sample(const Grid& g, const std::function<double(double, double)>& f) {
  ScalarField out(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.x(i), g.y(j));
  return out;
}

VectorField sample(const Grid& g, const std::function<Eigen::Vector2d(double, double)>& f) {
  VectorField out = VectorField::zero(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.set(i, j, f(g.x(i), g.y(j)));
  return out;
}

}  // namespace hvp
