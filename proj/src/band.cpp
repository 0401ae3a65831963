#include "stripwave/band.hpp"

#include <cmath>

#include "stripwave/homogenized.hpp"
#include "stripwave/layers.hpp"
#include "stripwave/params.hpp"

namespace stripwave::band {

namespace {

constexpr double kPi = 3.14159265358979323846;

// theta via its Taylor series at the precision needed by the secular
// equation (|beta| stays well below 1 in the Newton range)
double theta_smooth(double beta) { return layers::theta_taylor(beta, 40); }
double theta_smooth_deriv(double beta) { return layers::theta_taylor_deriv(beta, 40); }

}  // namespace

double secular(double eps, double mu, double Lambda, SeriesTruncation trunc) {
  if (!(Lambda > 0.0)) throw std::domain_error("secular: Lambda > 0");
  if (!(eps * eps * Lambda < 4.0))
    throw std::domain_error("secular: eps^2 Lambda must stay below 4");
  const double s = std::sqrt(Lambda);
  const double c = std::cos(s * kPi);
  const double base = s * c + mu * std::sin(s * kPi);
  if (eps == 0.0 || mu == 0.0) return base;
  const double th = layers::theta(eps * eps * Lambda, trunc);
  return base - eps * eps * eps * mu * Lambda * s * th * c;
}

double secular_dL(double eps, double mu, double Lambda, SeriesTruncation trunc) {
  (void)trunc;
  if (!(Lambda > 0.0)) throw std::domain_error("secular_dL: Lambda > 0");
  const double s = std::sqrt(Lambda);
  const double c = std::cos(s * kPi);
  const double sn = std::sin(s * kPi);
  double d = (c - kPi * s * sn + mu * kPi * c) / (2.0 * s);
  if (eps != 0.0 && mu != 0.0) {
    const double b = eps * eps * Lambda;
    const double th = theta_smooth(b);
    const double thp = theta_smooth_deriv(b);
    const double e3mu = eps * eps * eps * mu;
    // d/dL [ L^{3/2} theta(eps^2 L) cos(pi sqrt(L)) ]
    const double dterm = 1.5 * s * th * c + Lambda * s * eps * eps * thp * c -
                         Lambda * th * 0.5 * kPi * sn;
    d -= e3mu * dterm;
  }
  return d;
}

double bottom_eigenvalue(double eps, double mu) {
  if (!(eps >= 0.0)) throw std::domain_error("bottom_eigenvalue: eps >= 0");
  const double l1 = homogenized::lambda_n(mu, 1);
  if (eps == 0.0 || mu == 0.0) return l1;
  SeriesTruncation trunc;  // default 1e-12 on theta; enters scaled by eps^3 mu
  double L = l1;
  double prev_res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 60; ++it) {
    const double f = secular(eps, mu, L, trunc);
    const double fp = secular_dL(eps, mu, L, trunc);
    if (fp == 0.0) break;
    const double step = f / fp;
    L -= step;
    const double res = std::abs(f);
    if (res >= prev_res && std::abs(step) < 1e-14 * std::max(1.0, std::abs(L))) break;
    prev_res = res;
  }
  if (std::abs(L - l1) > 0.1 || !(L > 0.0) ||
      std::abs(secular(eps, mu, L, trunc)) > 1e-13 * std::max(1.0, std::abs(L))) {
    // bisection fallback on the admissible window around Lambda_1
    double lo = std::max(1e-12, l1 - 0.1), hi = l1 + 0.1;
    double flo = secular(eps, mu, lo, trunc);
    double fhi = secular(eps, mu, hi, trunc);
    if (flo * fhi > 0.0)
      throw std::runtime_error("bottom_eigenvalue: Newton diverged and no bracket");
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = secular(eps, mu, mid, trunc);
      if (flo * fm <= 0.0) {
        hi = mid;
        fhi = fm;
      } else {
        lo = mid;
        flo = fm;
      }
      if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
    }
    L = 0.5 * (lo + hi);
  }
  return L;
}

namespace {

// secular left-hand side along a power series Lambda(eps), coefficient-exact
series::PowerSeries secular_series(const series::PowerSeries& L, double mu) {
  const int J = L.order();
  const series::PowerSeries s = series::sqrt(L);
  const series::PowerSeries c = series::cos(s * kPi);
  const series::PowerSeries sn = series::sin(s * kPi);
  series::PowerSeries T = series::mul(s, c) + sn * mu;
  if (mu != 0.0) {
    // w = eps^2 * L has zero constant term; theta(w) summed exactly
    const series::PowerSeries w = L.shifted(2);
    std::vector<double> theta_coeffs(J + 1);
    for (int m = 0; m <= J; ++m) theta_coeffs[m] = layers::theta_taylor_coeff(m + 1);
    const series::PowerSeries th = series::compose(theta_coeffs, w);
    const series::PowerSeries l32 = series::mul(L, s);
    series::PowerSeries corr = series::mul(series::mul(l32, th), c).shifted(3);
    T -= corr * mu;
  }
  return T;
}

// derivative of the secular series w.r.t. Lambda, evaluated along Lambda(eps)
series::PowerSeries secular_series_dL(const series::PowerSeries& L, double mu) {
  const int J = L.order();
  const series::PowerSeries s = series::sqrt(L);
  const series::PowerSeries c = series::cos(s * kPi);
  const series::PowerSeries sn = series::sin(s * kPi);
  const series::PowerSeries inv2s = series::div(series::PowerSeries::constant(0.5, J), s);
  series::PowerSeries d = series::mul(c - series::mul(s, sn) * kPi + c * (mu * kPi), inv2s);
  if (mu != 0.0) {
    const series::PowerSeries w = L.shifted(2);
    std::vector<double> theta_coeffs(J + 1), theta_dcoeffs(J + 1);
    for (int m = 0; m <= J; ++m) {
      theta_coeffs[m] = layers::theta_taylor_coeff(m + 1);
      theta_dcoeffs[m] = (m + 2 <= J + 1) ? layers::theta_taylor_coeff(m + 2) * (m + 1) : 0.0;
    }
    const series::PowerSeries th = series::compose(theta_coeffs, w);
    const series::PowerSeries thp = series::compose(theta_dcoeffs, w);
    series::PowerSeries term =
        series::mul(series::mul(s, th), c) * 1.5 +
        series::mul(series::mul(series::mul(L, s), thp), c).shifted(2) -
        series::mul(series::mul(L, th), sn) * (0.5 * kPi);
    d -= term.shifted(3) * mu;
  }
  return d;
}

}  // namespace

LambdaExpansion bottom_series(double mu, int J) {
  if (J < 0 || J > 40) throw std::domain_error("bottom_series: 0 <= J <= 40");
  const double l1 = homogenized::lambda_n(mu, 1);
  series::PowerSeries L = series::PowerSeries::constant(l1, J);
  for (int it = 0; it < 80; ++it) {
    const series::PowerSeries T = secular_series(L, mu);
    const series::PowerSeries dT = secular_series_dL(L, mu);
    const series::PowerSeries delta = series::div(T, dT);
    L -= delta;
    double worst = 0.0;
    for (int j = 0; j <= J; ++j) worst = std::max(worst, std::abs(delta[j]));
    if (worst < 1e-15) break;
  }
  LambdaExpansion out;
  out.mu = mu;
  out.lambda1 = L[0];
  out.a = L.coeffs();
  if (mu != 0.0) {
    for (int j = 3; j <= J; ++j) {
      if (j == 4) continue;
      if (j % 2 == 1)
        out.K[j] = out.a[j] / (mu * mu);
      else
        out.K[j] = out.a[j] / (mu * mu * mu);
    }
  }
  return out;
}

double bottom_coefficient_closed(int j, double mu) {
  if (j < 3 || j > 8) throw std::domain_error("bottom_coefficient_closed: j in 3..8");
  const double l1 = homogenized::lambda_n(mu, 1);
  const double D = kPi * l1 + mu + kPi * mu * mu;
  const double z3 = zeta_odd(1), z5 = zeta_odd(2), z7 = zeta_odd(3);
  switch (j) {
    case 3:
      return -(z3 / 4.0) * l1 * l1 / D;
    case 4:
      return 0.0;
    case 5:
      return -(3.0 * z5 / 64.0) * l1 * l1 * l1 / D;
    case 6:
      return z3 * z3 * l1 * l1 * l1 *
             (2.0 * kPi * kPi * l1 * l1 + 7.0 * kPi * mu * l1 +
              2.0 * kPi * kPi * mu * mu * l1 + 7.0 * mu * mu + 7.0 * kPi * mu * mu * mu) /
             (64.0 * D * D * D);
    case 7:
      return -(5.0 * z7 / 512.0) * l1 * l1 * l1 * l1 / D;
    case 8:
      return 3.0 * z3 * z5 * l1 * l1 * l1 * l1 *
             (2.0 * kPi * kPi * l1 * l1 + 9.0 * kPi * mu * l1 +
              2.0 * kPi * kPi * mu * mu * l1 + 9.0 * mu * mu + 9.0 * mu * mu * mu * kPi) /
             (512.0 * D * D * D);
  }
  return 0.0;
}

double band_value(int n, double tau, double eps, double mu, bool refined) {
  if (!(eps > 0.0)) throw std::domain_error("band_value: eps > 0");
  if (!(std::abs(tau) < 1.0)) throw std::domain_error("band_value: |tau| < 1");
  const double shift = tau * tau / (eps * eps);
  if (refined) {
    if (n != 1 || tau != 0.0)
      throw std::domain_error("band_value: refined value only for n = 1, tau = 0");
    return shift + bottom_eigenvalue(eps, mu);
  }
  return shift + homogenized::lambda_n(mu, n);
}

double band_remainder_envelope(int n, double eps, double mu, double kappa) {
  return static_cast<double>(n) * n * n * n * std::sqrt(eps) * mu / std::sqrt(kappa);
}

CompositeMode::CompositeMode(double eps, double mu, double eta, SeriesTruncation trunc)
    : eps_(eps), mu_(mu), eta_(eta), trunc_(trunc) {
  if (!(eps > 0.0 && eta > 0.0)) throw std::domain_error("CompositeMode: eps, eta > 0");
  lambda_ = bottom_eigenvalue(eps, mu);
  sqrt_lambda_ = std::sqrt(lambda_);
  amp_ = sqrt_lambda_ * std::cos(sqrt_lambda_ * kPi);
  beta_ = eps * sqrt_lambda_;
}

double CompositeMode::operator()(Point2 x) const {
  if (x.c2 < 0.0 || x.c2 > kPi) throw std::domain_error("CompositeMode: 0 <= x2 <= pi");
  const double exterior = std::sin(sqrt_lambda_ * (x.c2 - kPi));
  const Point2 xi{x.c1 / eps_, x.c2 / eps_};
  const double rho = std::hypot(xi.c1, xi.c2);  // |xi| = eta |sigma|
  const double glue_arg = rho / eta_ * std::sqrt(eta_);
  const double glue = layers::cutoff(glue_arg);
  double outer_part = 0.0;
  if (glue < 1.0) {
    double bl = 0.0;
    const double cut2 = layers::cutoff(x.c2);
    if (cut2 > 0.0)
      bl = eps_ * amp_ *
           (layers::strip_layer(xi) + layers::helmholtz_layer(xi, beta_, trunc_));
    outer_part = (exterior + cut2 * bl) * (1.0 - glue);
  }
  double inner_part = 0.0;
  if (glue > 0.0) {
    const Point2 sigma{xi.c1 / eta_, xi.c2 / eta_};
    inner_part = glue * eps_ * amp_ * layers::window_layer(sigma);
  }
  return outer_part + inner_part;
}

}  // namespace stripwave::band
