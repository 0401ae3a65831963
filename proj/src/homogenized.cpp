#include "stripwave/homogenized.hpp"

#include <cmath>

namespace stripwave::homogenized {

namespace {

constexpr double kPi = 3.14159265358979323846;

// secular function in s = sqrt(Lambda) and its s-derivative
inline double eqn(double s, double mu) {
  return s * std::cos(s * kPi) + mu * std::sin(s * kPi);
}
inline double eqn_ds(double s, double mu) {
  return std::cos(s * kPi) - kPi * s * std::sin(s * kPi) + mu * kPi * std::cos(s * kPi);
}

}  // namespace

double lambda_n(double mu, int n) {
  if (n < 1) throw std::domain_error("lambda_n: n >= 1");
  if (!(mu > -0.1)) throw std::domain_error("lambda_n: mu must exceed -0.1");
  if (mu == 0.0) {
    const double s = n - 0.5;
    return s * s;
  }
  // For mu > 0 the root lies in (n - 1/2, n); for small negative mu it dips
  // slightly below n - 1/2 (stays above n - 0.6 for mu > -0.1).
  double lo = (mu > 0.0) ? n - 0.5 : n - 0.6;
  double hi = n - 1e-15;
  double flo = eqn(lo, mu);
  double fhi = eqn(hi, mu);
  if (flo == 0.0) return lo * lo;
  if (!(flo * fhi < 0.0)) throw std::runtime_error("lambda_n: root not bracketed");
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = eqn(mid, mu);
    if (fm == 0.0) { lo = hi = mid; break; }
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double f = eqn(s, mu);
    const double fp = eqn_ds(s, mu);
    if (fp == 0.0) break;
    s -= f / fp;
  }
  return s * s;
}

double lambda_n_taylor(double mu, int n) {
  if (n < 1) throw std::domain_error("lambda_n_taylor: n >= 1");
  const double half = n - 0.5;
  return half * half + mu / (kPi * half);
}

double eigenfunction(int n, double mu, double x2) {
  const double s = std::sqrt(lambda_n(mu, n));
  return std::sin(s * (x2 - kPi));
}

double green_kernel(double x2, double t, double mu) {
  if (x2 < 0.0 || x2 > kPi || t < 0.0 || t > kPi)
    throw std::domain_error("green_kernel: arguments must lie in [0, pi]");
  if (!(mu >= 0.0)) throw std::domain_error("green_kernel: mu >= 0");
  const double lo = std::min(x2, t);
  const double hi = std::max(x2, t);
  return (1.0 + mu * lo) * (kPi - hi) / (1.0 + kPi * mu);
}

void SampledFunction1D::validate() const {
  if (grid.size() != values.size() || grid.size() < 2)
    throw std::domain_error("SampledFunction1D: size mismatch");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::domain_error("SampledFunction1D: grid not increasing");
  if (std::abs(grid.front()) > 1e-12 || std::abs(grid.back() - kPi) > 1e-12)
    throw std::domain_error("SampledFunction1D: grid must span [0, pi]");
}

SampledFunction1D apply_inverse(const SampledFunction1D& F, double mu) {
  F.validate();
  const size_t n = F.grid.size();
  if (n < 8) throw config_error("apply_inverse: grid too coarse (need >= 8 nodes)");
  std::vector<double> w(n, 0.0);  // trapezoid weights
  for (size_t i = 0; i + 1 < n; ++i) {
    const double h = F.grid[i + 1] - F.grid[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  SampledFunction1D u;
  u.grid = F.grid;
  u.values.resize(n);
  for (size_t i = 0; i < n; ++i) {
    long double acc = 0.0L;
    for (size_t j = 0; j < n; ++j)
      acc += w[j] * green_kernel(F.grid[i], F.grid[j], mu) * F.values[j];
    u.values[i] = static_cast<double>(acc);
  }
  return u;
}

double value_at_zero(const SampledFunction1D& F, double mu) {
  return apply_inverse(F, mu).values.front();
}

double l2_norm(const SampledFunction1D& F) {
  F.validate();
  long double acc = 0.0L;
  for (size_t i = 0; i + 1 < F.grid.size(); ++i) {
    const double h = F.grid[i + 1] - F.grid[i];
    acc += 0.5 * h * (F.values[i] * F.values[i] + F.values[i + 1] * F.values[i + 1]);
  }
  return std::sqrt(static_cast<double>(acc));
}

}  // namespace stripwave::homogenized
