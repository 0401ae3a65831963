#pragma once

#include <span>
#include <vector>

#include "stripwave/common.hpp"

namespace stripwave::series {

// Truncated real power series sum_{j=0}^{J} c[j] t^j with coefficient-exact
// arithmetic at a fixed order J.  Nonlinear operations (sqrt, sin, cos,
// analytic composition) expand the outer function about the constant term
// and evaluate the finite nilpotent sum, so they are exact Taylor arithmetic.
class PowerSeries {
 public:
  PowerSeries() = default;
  explicit PowerSeries(int order) : c_(order + 1, 0.0) {}
  PowerSeries(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw std::domain_error("PowerSeries: empty coefficient list");
  }

  static PowerSeries constant(double a0, int order);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int j) const { return c_[j]; }
  double& operator[](int j) { return c_[j]; }
  const std::vector<double>& coeffs() const { return c_; }

  double eval(double t) const;  // Horner

  PowerSeries& operator+=(const PowerSeries& o);
  PowerSeries& operator-=(const PowerSeries& o);
  PowerSeries& operator*=(double s);

  // multiply by t^k (shift up, truncating at the order)
  PowerSeries shifted(int k) const;

 private:
  std::vector<double> c_;
};

PowerSeries operator+(PowerSeries a, const PowerSeries& b);
PowerSeries operator-(PowerSeries a, const PowerSeries& b);
PowerSeries operator*(PowerSeries a, double s);
PowerSeries operator*(double s, PowerSeries a);
PowerSeries mul(const PowerSeries& a, const PowerSeries& b);  // truncated Cauchy product
PowerSeries div(const PowerSeries& a, const PowerSeries& b);  // b[0] != 0

// sum_k outer[k] * (s - s[0])^k where outer[k] = f^(k)(s[0])/k!; outer must
// provide at least order+1 coefficients.
PowerSeries compose(std::span<const double> outer, const PowerSeries& s);

PowerSeries sqrt(const PowerSeries& s);  // s[0] > 0
PowerSeries sin(const PowerSeries& s);
PowerSeries cos(const PowerSeries& s);

}  // namespace stripwave::series
