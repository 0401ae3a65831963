#include "stripwave/fitting.hpp"

#include <cmath>

namespace stripwave::fitting {

RateFit fit_rate(std::span<const double> xs, std::span<const double> ys) {
  const size_t n = xs.size();
  if (n != ys.size() || n < 3)
    throw std::domain_error("fit_rate: need >= 3 (x, y) pairs");
  std::vector<double> lx(n), ly(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0 && ys[i] > 0.0))
      throw std::domain_error("fit_rate: samples must be positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::domain_error("fit_rate: degenerate x spread");
  RateFit fit;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  fit.r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

RateFit fit_rate(const std::vector<double>& xs, const std::vector<double>& ys) {
  return fit_rate(std::span<const double>(xs), std::span<const double>(ys));
}

Extrapolation richardson(std::span<const double> v, double refinement) {
  Extrapolation out;
  const size_t n = v.size();
  if (n == 0) throw std::domain_error("richardson: empty sequence");
  out.value = v[n - 1];
  if (n < 3) return out;
  const double d1 = v[n - 2] - v[n - 3];
  const double d2 = v[n - 1] - v[n - 2];
  // contraction with consistent sign makes Aitken trustworthy
  if (d2 != 0.0 && d1 * d2 > 0.0 && std::abs(d2) < std::abs(d1)) {
    const double rho = d1 / d2;  // > 1
    out.value = v[n - 1] + d2 / (rho - 1.0);
    out.rate = std::log(rho) / std::log(refinement);
    out.reliable = true;
  }
  out.step_error = std::abs(out.value - v[n - 1]);
  return out;
}

}  // namespace stripwave::fitting
