#pragma once

#include <functional>
#include <string>
#include <vector>

namespace hvp {

/// Ice growth rate f_gr on [0, inf) together with bounds on |f| and |f'|.
///
/// The bounds are reported by the factory that built the callable and are
/// checked to be finite on construction.
class GrowthRate {
 public:
  GrowthRate();
  GrowthRate(std::function<double(double)> f, double sup_value, double sup_derivative,
             std::string name);

  static GrowthRate zero();
  static GrowthRate constant(double c);
  /// g0 * (1 - tanh(x)).
  static GrowthRate tanh_profile(double g0);
  /// Piecewise-linear through (xs, ys), clamped outside [xs.front(), xs.back()].
  static GrowthRate table(std::vector<double> xs, std::vector<double> ys);
  static GrowthRate from_callable(std::function<double(double)> f, double sup_value,
                                  double sup_derivative);

  double operator()(double x) const { return f_(x); }
  double sup_value() const { return sup_value_; }
  double sup_derivative() const { return sup_derivative_; }
  const std::string& name() const { return name_; }

 private:
  std::function<double(double)> f_;
  double sup_value_;
  double sup_derivative_;
  std::string name_;
};

/// S_h = f(h/a) a + (1 - a) f(0). Throws DomainError for a <= 0.
double source_h(double h, double a, const GrowthRate& f_gr, double kappa);

/// S_a: growth addend (f(0)/kappa)(1 - a) when f(0) > 0, melt addend
/// (a / 2h) S_h when S_h < 0; the zero cases contribute nothing.
double source_a(double h, double a, const GrowthRate& f_gr, double kappa);

}  // namespace hvp
