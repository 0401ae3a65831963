#pragma once

#include <map>

#include "stripwave/common.hpp"
#include "stripwave/power_series.hpp"

namespace stripwave::band {

// Machinery for the bottom of the spectrum: the secular equation
//     sqrt(L) cos(sqrt(L) pi) + mu sin(sqrt(L) pi)
//         - eps^3 mu L^{3/2} theta(eps^2 L) cos(sqrt(L) pi) = 0,
// its scalar root Lambda(eps, mu) near Lambda_1(mu), the eps-power series of
// that root with coefficients K_j, and the composite approximate ground mode.

// left-hand side of the secular equation; requires eps^2 * Lambda < 4
double secular(double eps, double mu, double Lambda, SeriesTruncation trunc = {});
// partial derivative w.r.t. Lambda
double secular_dL(double eps, double mu, double Lambda, SeriesTruncation trunc = {});

// the root with Lambda = Lambda_1(mu) + o(1): Newton from Lambda_1(mu),
// residual at machine level (contract: <= 1e-13), bisection fallback on the
// bracket [Lambda_1 - 0.1, Lambda_1 + 0.1]
double bottom_eigenvalue(double eps, double mu);

struct LambdaExpansion {
  double mu = 0.0;
  double lambda1 = 0.0;            // constant term
  std::vector<double> a;           // raw eps-coefficients a_0..a_J
  std::map<int, double> K;         // K_j = a_j/mu^2 (odd j), a_j/mu^3 (even j >= 6)
};

// Newton iteration on truncated power series: expands the secular root in
// powers of eps up to order J (J <= 40).  For mu = 0 the series is the
// constant 1/4 and no K values are extracted.
LambdaExpansion bottom_series(double mu, int J);

// closed forms of K_3..K_8
double bottom_coefficient_closed(int j, double mu);

// tau^2/eps^2 + Lambda_n(mu); for n = 1, tau = 0 the refined variant uses
// the secular root instead of Lambda_1.
double band_value(int n, double tau, double eps, double mu, bool refined = false);

// error envelope n^4 eps^{1/2} mu / sqrt(kappa) of the band remainder
// (multiplicative constant unknown)
double band_remainder_envelope(int n, double eps, double mu, double kappa);

// Composite approximate ground mode on the periodicity cell at tau = 0:
// exterior profile sin(sqrt(L)(x2-pi)), boundary-layer and window pieces
// glued by cutoffs; L = bottom_eigenvalue(eps, mu).
class CompositeMode {
 public:
  CompositeMode(double eps, double mu, double eta, SeriesTruncation trunc = {});

  double operator()(Point2 x) const;  // x in the cell, |x1| <= eps*pi/2

  double lambda() const { return lambda_; }

 private:
  double eps_, mu_, eta_;
  double lambda_, sqrt_lambda_, amp_;  // amp = sqrt(L) cos(sqrt(L) pi)
  double beta_;                        // eps * sqrt(L)
  SeriesTruncation trunc_;
};

}  // namespace stripwave::band
