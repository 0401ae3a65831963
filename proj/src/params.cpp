#include "stripwave/params.hpp"

#include <array>
#include <cmath>

namespace stripwave {

namespace {

constexpr double kHalfPi = 1.57079632679489661923;

void check_common(double epsilon, double tau, double kappa, double alpha) {
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be positive");
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::domain_error("kappa must lie in (0,1)");
  if (!(std::abs(tau) <= 1.0 - kappa))
    throw std::domain_error("quasimomentum violates |tau| <= 1 - kappa");
  if (!(alpha > 0.5 && alpha < 1.0))
    throw std::domain_error("alpha must lie in (1/2, 1)");
}

// Partial sum + Euler-Maclaurin tail for zeta(s), s >= 3.  The first
// neglected term is O(s^3 N^{-s-3}) < 1e-19 at N = 1000.
double zeta_direct(double s) {
  const int N = 1000;
  long double sum = 0.0L;
  for (int n = N; n >= 1; --n) sum += std::pow(static_cast<long double>(n), -s);
  const long double Nl = N;
  sum += std::pow(Nl, 1.0L - s) / (s - 1.0L);
  sum -= 0.5L * std::pow(Nl, -s);
  sum += (s / 12.0L) * std::pow(Nl, -s - 1.0L);
  return static_cast<double>(sum);
}

}  // namespace

ModelParams ModelParams::from_eta(double epsilon, double eta, double tau,
                                  double kappa, double alpha) {
  check_common(epsilon, tau, kappa, alpha);
  if (!(eta > 0.0 && eta < kHalfPi))
    throw std::domain_error("eta must lie in (0, pi/2)");
  ModelParams p;
  p.epsilon = epsilon;
  p.eta = eta;
  p.ln_eta = std::log(eta);
  p.mu = mu_from(epsilon, eta);
  p.tau = tau;
  p.kappa = kappa;
  p.alpha = alpha;
  return p;
}

ModelParams ModelParams::from_ln_eta(double epsilon, double ln_eta, double tau,
                                     double kappa, double alpha) {
  check_common(epsilon, tau, kappa, alpha);
  if (!(ln_eta < std::log(kHalfPi)))
    throw std::domain_error("ln_eta must be below ln(pi/2)");
  ModelParams p;
  p.epsilon = epsilon;
  p.ln_eta = ln_eta;
  p.eta = std::exp(ln_eta);  // may underflow to 0; ln_eta stays authoritative
  if (!(ln_eta < 0.0)) throw std::domain_error("ln_eta must be negative");
  p.mu = -1.0 / (epsilon * ln_eta);
  p.tau = tau;
  p.kappa = kappa;
  p.alpha = alpha;
  return p;
}

ModelParams ModelParams::from_mu(double epsilon, double mu, double tau,
                                 double kappa, double alpha) {
  check_common(epsilon, tau, kappa, alpha);
  if (!(mu > 0.0)) throw std::domain_error("mu must be positive");
  return from_ln_eta(epsilon, -1.0 / (epsilon * mu), tau, kappa, alpha);
}

void ModelParams::validate() const {
  check_common(epsilon, tau, kappa, alpha);
  if (!(ln_eta < 0.0)) throw std::domain_error("ln_eta must be negative");
  if (eta > 0.0) {
    if (!(eta < kHalfPi)) throw std::domain_error("eta must lie in (0, pi/2)");
    const double mu_check = -1.0 / (epsilon * ln_eta);
    if (std::abs(mu - mu_check) > 1e-12 * std::max(1.0, std::abs(mu)))
      throw std::domain_error("mu inconsistent with -1/(eps ln eta)");
  }
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::NeumannHomogenized: return "neumann";
    case Regime::DirichletHomogenized: return "dirichlet";
    case Regime::Indeterminate: return "indeterminate";
  }
  return "?";
}

double mu_from(double epsilon, double eta) {
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw std::domain_error("eta must lie in (0, 1)");
  return -1.0 / (epsilon * std::log(eta));
}

double eta_from(double epsilon, double mu) {
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be positive");
  if (!(mu > 0.0)) throw std::domain_error("mu must be positive");
  return std::exp(-1.0 / (epsilon * mu));
}

RegimeTag classify_regime(const ModelParams& params, double threshold) {
  if (!(threshold > 0.0)) throw std::domain_error("threshold must be positive");
  const double indicator = params.epsilon * params.ln_eta;
  Regime tag = Regime::Indeterminate;
  if (indicator <= -threshold)
    tag = Regime::NeumannHomogenized;
  else if (indicator > -1.0 / threshold && indicator < 0.0)
    tag = Regime::DirichletHomogenized;
  return {tag, indicator};
}

double zeta_odd(int j) {
  if (j < 1) throw std::domain_error("zeta_odd requires j >= 1");
  constexpr int kCached = 64;
  static const std::array<double, kCached> cache = [] {
    std::array<double, kCached> c{};
    for (int i = 0; i < kCached; ++i) c[i] = zeta_direct(2.0 * (i + 1) + 1.0);
    return c;
  }();
  if (j <= kCached) return cache[j - 1];
  return zeta_direct(2.0 * j + 1.0);
}

}  // namespace stripwave
