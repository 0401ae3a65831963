#pragma once

#include <optional>

#include "stripwave/common.hpp"

namespace stripwave {

// Joint parameter state of the model.  The lower boundary of the strip
// {0 < x2 < pi} carries Dirichlet windows |x1 - eps*pi*j| < eps*eta and
// Neumann conditions in between; mu = -1/(eps ln eta) is the homogenized
// Robin coefficient.  eta may underflow to zero, so ln_eta is kept as the
// primary quantity alongside eta.
struct ModelParams {
  double epsilon;    // period scale, > 0
  double eta;        // half-width of the Dirichlet window in xi units, (0, pi/2)
  double ln_eta;     // ln(eta), always finite and negative for eta < 1
  double mu;         // homogenized Robin coefficient, = -1/(epsilon*ln_eta)
  double tau = 0.0;  // quasimomentum in [-1, 1)
  double kappa = 0.5;  // margin 1 - |tau| >= kappa, in (0, 1)
  double alpha = 0.75; // corrector cutoff exponent, in (1/2, 1)

  static ModelParams from_eta(double epsilon, double eta, double tau = 0.0,
                              double kappa = 0.5, double alpha = 0.75);
  static ModelParams from_ln_eta(double epsilon, double ln_eta, double tau = 0.0,
                                 double kappa = 0.5, double alpha = 0.75);
  static ModelParams from_mu(double epsilon, double mu, double tau = 0.0,
                             double kappa = 0.5, double alpha = 0.75);

  void validate() const;
};

enum class Regime {
  NeumannHomogenized,    // eps*ln(eta) large negative
  DirichletHomogenized,  // eps*ln(eta) near 0
  Indeterminate,
};

struct RegimeTag {
  Regime tag;
  double indicator;  // value of eps*ln(eta)
};

const char* regime_name(Regime r);

// mu(eps, eta) = -1/(eps ln eta); requires 0 < eta < 1, eps > 0.
double mu_from(double epsilon, double eta);

// Inverse of mu_from: eta = exp(-1/(eps*mu)); requires eps, mu > 0.
double eta_from(double epsilon, double mu);

// Classifies the parameter point by the indicator eps*ln(eta).  Only the two
// asymptotic regimes are canonical, so the finite cutoff is a user threshold
// (default 5): Neumann-homogenized if indicator <= -threshold,
// Dirichlet-homogenized if indicator in (-1/threshold, 0).
RegimeTag classify_regime(const ModelParams& params, double threshold = 5.0);

// zeta(2j+1) for j >= 1, absolute error <= 1e-14.  Values for j <= 64 are
// computed once and cached (thread-safe one-time initialization).
double zeta_odd(int j);

}  // namespace stripwave
