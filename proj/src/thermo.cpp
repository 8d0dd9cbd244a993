#include "hvp/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hvp/errors.hpp"

namespace hvp {

GrowthRate::GrowthRate() : GrowthRate(GrowthRate::zero()) {}

GrowthRate::GrowthRate(std::function<double(double)> f, double sup_value, double sup_derivative,
                       std::string name)
    : f_(std::move(f)),
      sup_value_(sup_value),
      sup_derivative_(sup_derivative),
      name_(std::move(name)) {
  if (!std::isfinite(sup_value_) || !std::isfinite(sup_derivative_)) {
    throw DomainError("growth rate must be bounded with bounded derivative");
  }
}

GrowthRate GrowthRate::zero() { return GrowthRate([](double) { return 0.0; }, 0.0, 0.0, "zero"); }

GrowthRate GrowthRate::constant(double c) {
  return GrowthRate([c](double) { return c; }, std::abs(c), 0.0, "constant");
}

GrowthRate GrowthRate::tanh_profile(double g0) {
  // |d/dx tanh| <= 1, and 1 - tanh lies in (0, 1] on [0, inf).
  return GrowthRate([g0](double x) { return g0 * (1.0 - std::tanh(x)); }, std::abs(g0),
                    std::abs(g0), "tanh");
}

GrowthRate GrowthRate::table(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() < 2 || xs.size() != ys.size()) {
    throw DomainError("growth table needs at least two (x, y) pairs of equal length");
  }
  if (!std::is_sorted(xs.begin(), xs.end()) ||
      std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
    throw DomainError("growth table abscissae must be strictly increasing");
  }
  double sup_value = 0.0;
  double sup_slope = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sup_value = std::max(sup_value, std::abs(ys[i]));
    if (i + 1 < xs.size()) {
      sup_slope = std::max(sup_slope, std::abs((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])));
    }
  }
  auto f = [xs = std::move(xs), ys = std::move(ys)](double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return (1.0 - w) * ys[i] + w * ys[i + 1];
  };
  return GrowthRate(std::move(f), sup_value, sup_slope, "table");
}

GrowthRate GrowthRate::from_callable(std::function<double(double)> f, double sup_value,
                                     double sup_derivative) {
  return GrowthRate(std::move(f), sup_value, sup_derivative, "callable");
}

double source_h(double h, double a, const GrowthRate& f_gr, double /*kappa*/) {
  if (!(a > 0.0)) throw DomainError("source_h: concentration must be positive (h/a undefined)");
  return f_gr(h / a) * a + (1.0 - a) * f_gr(0.0);
}

double source_a(double h, double a, const GrowthRate& f_gr, double kappa) {
  const double s_h = source_h(h, a, f_gr, kappa);
  const double f0 = f_gr(0.0);
  const double growth = f0 > 0.0 ? (f0 / kappa) * (1.0 - a) : 0.0;
  const double melt = s_h < 0.0 ? (a / (2.0 * h)) * s_h : 0.0;
  return growth + melt;
}

}  // namespace hvp
