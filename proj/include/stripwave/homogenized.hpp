#pragma once

#include <vector>

#include "stripwave/common.hpp"

namespace stripwave::homogenized {

// Eigenpairs and Green's function of the 1-D operator -d^2/dx2^2 on (0, pi)
// with u(pi) = 0 and the Robin condition u'(0) - mu*u(0) = 0.

// n-th eigenvalue Lambda_n(mu): the root of
//     sqrt(L) cos(sqrt(L) pi) + mu sin(sqrt(L) pi) = 0
// with sqrt(L) in [n - 1/2, n); strictly increasing in mu, residual <= 1e-12.
// Small negative mu (> -0.1) is accepted for derivative probes.
double lambda_n(double mu, int n);

// two-term expansion (n - 1/2)^2 + mu/(pi (n - 1/2))
double lambda_n_taylor(double mu, int n);

// sin(sqrt(Lambda_n(mu)) (x2 - pi))
double eigenfunction(int n, double mu, double x2);

// Green's kernel G(x2, t) = (1 + mu*min)(pi - max)/(1 + pi*mu); symmetric,
// G(pi, .) = 0, dG/dx2(0) = mu G(0, .) for t > 0.
double green_kernel(double x2, double t, double mu);

struct SampledFunction1D {
  std::vector<double> grid;    // strictly increasing, spans [0, pi]
  std::vector<double> values;  // one per node

  void validate() const;
};

// u = Q_mu^{-1} F by composite trapezoid quadrature of the Green kernel on
// the sample grid (>= 8 nodes).
SampledFunction1D apply_inverse(const SampledFunction1D& F, double mu);

// (Q_mu^{-1} F)(0); satisfies |value| <= 5 ||F||_L2.
double value_at_zero(const SampledFunction1D& F, double mu);

// trapezoid L2 norm of a sampled function
double l2_norm(const SampledFunction1D& F);

}  // namespace stripwave::homogenized
