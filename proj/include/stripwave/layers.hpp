#pragma once

#include <array>

#include "stripwave/common.hpp"

namespace stripwave::layers {

// ---- harmonic boundary layer on the half strip ----------------------------
//
// strip_layer is the pi-periodic, even, exponentially decaying harmonic
// function on {xi2 > 0} with normal derivative d/dxi2 = -1 on the punctured
// boundary {xi2 = 0, xi1 != pi*j}.  Closed form
//     ln|sin(xi1 + i*xi2)| + ln 2 - xi2  ==  ln|1 - exp(2i*xi1 - 2*xi2)|,
// the right-hand side being the overflow-safe exact rearrangement used here.
// Logarithmic singularity at the lattice points (pi*j, 0).

double strip_layer(Point2 xi);
// gradient w.r.t. (xi1, xi2); on {xi2 = 0} the second component is exactly -1
std::array<double, 2> strip_layer_grad(Point2 xi);

// Fourier series -sum 1/n exp(-2n xi2) cos(2n xi1); requires xi2 > 0.
SeriesValue strip_layer_series_v(Point2 xi, SeriesTruncation trunc = {});
double strip_layer_series(Point2 xi, SeriesTruncation trunc = {});

// ---- half-plane window profile ---------------------------------------------
//
// window_layer is Re ln(z + sqrt(z^2-1)), z = sigma1 + i*sigma2, with the
// branch fixed by sqrt(1) = 1: zero on the window {|sigma1| <= 1, sigma2 = 0},
// zero normal derivative on {|sigma1| > 1, sigma2 = 0}, and growing like
// ln|sigma| + ln 2 at infinity.

double window_layer(Point2 sigma);
std::array<double, 2> window_layer_grad(Point2 sigma);

// ---- Helmholtz correction to the layer -------------------------------------
//
// helmholtz_layer solves (Delta + beta^2) Z = -beta^2 * strip_layer on the
// half strip with zero Neumann data; Fourier series
//   sum 1/n ( exp(-2n xi2) - 2n/sqrt(4n^2-beta^2) exp(-sqrt(4n^2-beta^2) xi2) ) cos(2n xi1).
// Requires |beta| < 2; xi2 >= 0 (absolutely convergent on the boundary).

SeriesValue helmholtz_layer_v(Point2 xi, double beta, SeriesTruncation trunc = {});
double helmholtz_layer(Point2 xi, double beta, SeriesTruncation trunc = {});

// strip_layer + helmholtz_layer summed in one exponentially convergent
// series; requires xi2 > 0, |beta| < 2.
SeriesValue layer_sum_series_v(Point2 xi, double beta, SeriesTruncation trunc = {});
double layer_sum_series(Point2 xi, double beta, SeriesTruncation trunc = {});

// value of helmholtz_layer at the origin, summed term by term;
// equals beta^2 * theta(beta^2).
SeriesValue helmholtz_layer_origin_v(double beta, SeriesTruncation trunc = {});
double helmholtz_layer_origin(double beta, SeriesTruncation trunc = {});

// ---- theta -----------------------------------------------------------------
//
// theta(beta) = -sum_{j>=1} 1/( j sqrt(4j^2-beta) (2j + sqrt(4j^2-beta)) ),
// |beta| <= 3.9 (kept away from the j=1 branch point at beta = 4).

SeriesValue theta_v(double beta, SeriesTruncation trunc = {});
double theta(double beta, SeriesTruncation trunc = {});

// Taylor sum -sum_{j=1}^{terms} (2j-1)!! zeta(2j+1) / (8^j j!) beta^{j-1}
double theta_taylor(double beta, int terms);
double theta_taylor_deriv(double beta, int terms);
// coefficient of beta^{j-1} in the Taylor series, j >= 1
double theta_taylor_coeff(int j);

// ---- smooth cutoff ----------------------------------------------------------
//
// C^inf monotone cutoff: 1 for t <= 1, 0 for t >= 3/2, built from the
// exp(-1/t) smooth step on the transition interval.

double cutoff(double t);
double cutoff_d1(double t);
double cutoff_d2(double t);

}  // namespace stripwave::layers
