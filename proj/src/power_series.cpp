#include "stripwave/power_series.hpp"

#include <cmath>

namespace stripwave::series {

namespace {

void require_same_order(const PowerSeries& a, const PowerSeries& b) {
  if (a.order() != b.order())
    throw std::domain_error("PowerSeries: order mismatch");
}

}  // namespace

PowerSeries PowerSeries::constant(double a0, int order) {
  PowerSeries s(order);
  s[0] = a0;
  return s;
}

double PowerSeries::eval(double t) const {
  double acc = 0.0;
  for (int j = order(); j >= 0; --j) acc = acc * t + c_[j];
  return acc;
}

PowerSeries& PowerSeries::operator+=(const PowerSeries& o) {
  require_same_order(*this, o);
  for (int j = 0; j <= order(); ++j) c_[j] += o[j];
  return *this;
}

PowerSeries& PowerSeries::operator-=(const PowerSeries& o) {
  require_same_order(*this, o);
  for (int j = 0; j <= order(); ++j) c_[j] -= o[j];
  return *this;
}

PowerSeries& PowerSeries::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

PowerSeries PowerSeries::shifted(int k) const {
  if (k < 0) throw std::domain_error("PowerSeries::shifted: k >= 0");
  PowerSeries out(order());
  for (int j = 0; j + k <= order(); ++j) out[j + k] = c_[j];
  return out;
}

PowerSeries operator+(PowerSeries a, const PowerSeries& b) { return a += b; }
PowerSeries operator-(PowerSeries a, const PowerSeries& b) { return a -= b; }
PowerSeries operator*(PowerSeries a, double s) { return a *= s; }
PowerSeries operator*(double s, PowerSeries a) { return a *= s; }

PowerSeries mul(const PowerSeries& a, const PowerSeries& b) {
  require_same_order(a, b);
  const int J = a.order();
  PowerSeries out(J);
  for (int j = 0; j <= J; ++j) {
    long double acc = 0.0L;
    for (int k = 0; k <= j; ++k) acc += static_cast<long double>(a[k]) * b[j - k];
    out[j] = static_cast<double>(acc);
  }
  return out;
}

PowerSeries div(const PowerSeries& a, const PowerSeries& b) {
  require_same_order(a, b);
  if (b[0] == 0.0) throw std::domain_error("PowerSeries div: zero constant term");
  const int J = a.order();
  PowerSeries out(J);
  for (int j = 0; j <= J; ++j) {
    long double acc = a[j];
    for (int k = 0; k < j; ++k) acc -= static_cast<long double>(out[k]) * b[j - k];
    out[j] = static_cast<double>(acc / b[0]);
  }
  return out;
}

PowerSeries compose(std::span<const double> outer, const PowerSeries& s) {
  const int J = s.order();
  if (static_cast<int>(outer.size()) < J + 1)
    throw std::domain_error("compose: need order+1 outer coefficients");
  PowerSeries t = s;  // nilpotent part
  t[0] = 0.0;
  // Horner in the nilpotent series
  PowerSeries acc = PowerSeries::constant(outer[J], J);
  for (int k = J - 1; k >= 0; --k) {
    acc = mul(acc, t);
    acc[0] += outer[k];
  }
  return acc;
}

PowerSeries sqrt(const PowerSeries& s) {
  const int J = s.order();
  const double a = s[0];
  if (!(a > 0.0)) throw std::domain_error("PowerSeries sqrt: constant term must be > 0");
  std::vector<double> outer(J + 1);
  outer[0] = std::sqrt(a);
  for (int k = 1; k <= J; ++k)
    outer[k] = outer[k - 1] * (1.5 - k) / (k * a);
  return compose(outer, s);
}

PowerSeries sin(const PowerSeries& s) {
  const int J = s.order();
  const double a = s[0];
  std::vector<double> outer(J + 1);
  double fact = 1.0;
  for (int k = 0; k <= J; ++k) {
    if (k > 0) fact *= k;
    const double d = (k % 4 == 0)   ? std::sin(a)
                     : (k % 4 == 1) ? std::cos(a)
                     : (k % 4 == 2) ? -std::sin(a)
                                    : -std::cos(a);
    outer[k] = d / fact;
  }
  return compose(outer, s);
}

PowerSeries cos(const PowerSeries& s) {
  const int J = s.order();
  const double a = s[0];
  std::vector<double> outer(J + 1);
  double fact = 1.0;
  for (int k = 0; k <= J; ++k) {
    if (k > 0) fact *= k;
    const double d = (k % 4 == 0)   ? std::cos(a)
                     : (k % 4 == 1) ? -std::sin(a)
                     : (k % 4 == 2) ? -std::cos(a)
                                    : std::sin(a);
    outer[k] = d / fact;
  }
  return compose(outer, s);
}

}  // namespace stripwave::series
