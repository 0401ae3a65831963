#include "stripwave/layers.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "stripwave/params.hpp"

namespace stripwave::layers {

namespace {

using cplx = std::complex<double>;

constexpr double kLn2 = 0.69314718055994530942;

[[noreturn]] void truncation_fail(const char* who, double bound) {
  throw truncation_error(std::string(who) + ": tolerance unreachable within n_max", bound);
}

}  // namespace

// ---------------------------------------------------------------------------
// strip layer

double strip_layer(Point2 xi) {
  if (xi.c2 < 0.0) throw std::domain_error("strip_layer: xi2 must be >= 0");
  // |1 - e^{2i xi1 - 2 xi2}|^2 = expm1(-2 xi2)^2 + 4 e^{-2 xi2} sin^2(xi1)
  const double a = std::expm1(-2.0 * xi.c2);
  const double s = std::sin(xi.c1);
  const double m2 = a * a + 4.0 * std::exp(-2.0 * xi.c2) * s * s;
  if (m2 == 0.0)
    throw singularity_error("strip_layer: logarithmic singularity at (pi*j, 0)");
  return 0.5 * std::log(m2);
}

std::array<double, 2> strip_layer_grad(Point2 xi) {
  if (xi.c2 < 0.0) throw std::domain_error("strip_layer_grad: xi2 must be >= 0");
  if (xi.c2 <= 30.0) {
    const cplx w(xi.c1, xi.c2);
    const cplx sw = std::sin(w);
    if (sw == cplx(0.0, 0.0))
      throw singularity_error("strip_layer_grad: singular point (pi*j, 0)");
    const cplx cot = std::cos(w) / sw;
    return {cot.real(), -cot.imag() - 1.0};
  }
  // far field: derivative of ln(1 - q), q = e^{2iw}, |q| tiny
  const cplx q = std::exp(cplx(-2.0 * xi.c2, 2.0 * xi.c1));
  const cplx h = cplx(0.0, -2.0) * q / (1.0 - q);
  return {h.real(), -h.imag()};
}

SeriesValue strip_layer_series_v(Point2 xi, SeriesTruncation trunc) {
  if (!(xi.c2 > 0.0))
    throw std::domain_error("strip_layer_series: converges only for xi2 > 0");
  const double r = std::exp(-2.0 * xi.c2);
  long double sum = 0.0L;
  for (long n = 1; n <= trunc.n_max; ++n) {
    sum -= std::exp(-2.0 * n * xi.c2) * std::cos(2.0 * n * xi.c1) / n;
    const double tail =
        std::exp(-2.0 * (n + 1) * xi.c2) / ((n + 1) * (1.0 - r));
    if (tail <= trunc.tol)
      return {static_cast<double>(sum), tail, n};
  }
  truncation_fail("strip_layer_series",
                  std::exp(-2.0 * (trunc.n_max + 1) * xi.c2) /
                      ((trunc.n_max + 1) * (1.0 - r)));
}

double strip_layer_series(Point2 xi, SeriesTruncation trunc) {
  return strip_layer_series_v(xi, trunc).value;
}

// ---------------------------------------------------------------------------
// window profile

double window_layer(Point2 sigma) {
  if (sigma.c2 < 0.0) throw std::domain_error("window_layer: sigma2 must be >= 0");
  if (sigma.c2 == 0.0 && std::abs(sigma.c1) <= 1.0) return 0.0;
  const double r2 = sigma.c1 * sigma.c1 + sigma.c2 * sigma.c2;
  if (r2 > 1e16)  // ln|sigma| + ln 2 with relative error below 1e-16
    return kLn2 + 0.5 * std::log(r2);
  const cplx z(sigma.c1, sigma.c2);
  return std::abs(std::acosh(z).real());
}

std::array<double, 2> window_layer_grad(Point2 sigma) {
  if (sigma.c2 < 0.0) throw std::domain_error("window_layer_grad: sigma2 must be >= 0");
  const cplx z(sigma.c1, sigma.c2);
  const double r2 = sigma.c1 * sigma.c1 + sigma.c2 * sigma.c2;
  if (sigma.c2 == 0.0 && std::abs(sigma.c1) == 1.0)
    throw singularity_error("window_layer_grad: square-root singularity at (+-1, 0)");
  if (r2 > 1e16) {
    return {sigma.c1 / r2, sigma.c2 / r2};
  }
  const cplx fp = 1.0 / (std::sqrt(z - 1.0) * std::sqrt(z + 1.0));
  return {fp.real(), -fp.imag()};
}

// ---------------------------------------------------------------------------
// Helmholtz correction

namespace {

// relative excess 2n/sqrt(4n^2-b^2) - 1 and gap 2n - sqrt(4n^2-b^2),
// both evaluated without cancellation
inline void helmholtz_term_pieces(long n, double beta2, double& delta, double& gap) {
  const double root = std::sqrt(4.0 * n * n - beta2);
  gap = beta2 / (2.0 * n + root);
  delta = gap / root;
}

}  // namespace

SeriesValue helmholtz_layer_v(Point2 xi, double beta, SeriesTruncation trunc) {
  if (!(std::abs(beta) < 2.0))
    throw std::domain_error("helmholtz_layer: requires |beta| < 2");
  if (xi.c2 < 0.0) throw std::domain_error("helmholtz_layer: xi2 must be >= 0");
  const double b2 = beta * beta;
  long double sum = 0.0L;
  for (long n = 1; n <= trunc.n_max; ++n) {
    double delta, gap;
    helmholtz_term_pieces(n, b2, delta, gap);
    const double bracket =
        -std::exp(-2.0 * n * xi.c2) * std::expm1(std::log1p(delta) + gap * xi.c2);
    sum += bracket * std::cos(2.0 * n * xi.c1) / n;
    if (n >= 4) {
      double tail;
      const long m = n + 1;
      if (xi.c2 == 0.0) {
        tail = 0.078 * b2 / (static_cast<double>(n) * n);
      } else {
        const double q = std::exp(-1.73 * xi.c2);
        tail = b2 * std::exp(-1.73 * m * xi.c2) / (1.0 - q) *
               (0.27 * xi.c2 / (static_cast<double>(m) * m) +
                0.156 / (static_cast<double>(m) * m * m));
      }
      if (tail <= trunc.tol) return {static_cast<double>(sum), tail, n};
    }
  }
  truncation_fail("helmholtz_layer", trunc.tol);
}

double helmholtz_layer(Point2 xi, double beta, SeriesTruncation trunc) {
  return helmholtz_layer_v(xi, beta, trunc).value;
}

SeriesValue layer_sum_series_v(Point2 xi, double beta, SeriesTruncation trunc) {
  if (!(std::abs(beta) < 2.0))
    throw std::domain_error("layer_sum_series: requires |beta| < 2");
  if (!(xi.c2 > 0.0))
    throw std::domain_error("layer_sum_series: converges only for xi2 > 0");
  const double b2 = beta * beta;
  long double sum = 0.0L;
  for (long n = 1; n <= trunc.n_max; ++n) {
    const double root = std::sqrt(4.0 * n * n - b2);
    sum -= 2.0 / root * std::exp(-root * xi.c2) * std::cos(2.0 * n * xi.c1);
    if (n >= 4) {
      const long m = n + 1;
      const double q = std::exp(-1.73 * xi.c2);
      const double tail =
          (2.0 / 1.73) * std::exp(-1.73 * m * xi.c2) / (m * (1.0 - q));
      if (tail <= trunc.tol) return {static_cast<double>(sum), tail, n};
    }
  }
  truncation_fail("layer_sum_series", trunc.tol);
}

double layer_sum_series(Point2 xi, double beta, SeriesTruncation trunc) {
  return layer_sum_series_v(xi, beta, trunc).value;
}

SeriesValue helmholtz_layer_origin_v(double beta, SeriesTruncation trunc) {
  if (!(std::abs(beta) < 2.0))
    throw std::domain_error("helmholtz_layer_origin: requires |beta| < 2");
  const double b2 = beta * beta;
  long double sum = 0.0L;
  for (long n = 1; n <= trunc.n_max; ++n) {
    double delta, gap;
    helmholtz_term_pieces(n, b2, delta, gap);
    sum -= delta / n;
    if (n >= 4) {
      const double tail = 0.078 * b2 / (static_cast<double>(n) * n);
      if (tail <= trunc.tol) return {static_cast<double>(sum), tail, n};
    }
  }
  truncation_fail("helmholtz_layer_origin", trunc.tol);
}

double helmholtz_layer_origin(double beta, SeriesTruncation trunc) {
  return helmholtz_layer_origin_v(beta, trunc).value;
}

// ---------------------------------------------------------------------------
// theta

SeriesValue theta_v(double beta, SeriesTruncation trunc) {
  if (!(std::abs(beta) <= 3.9))
    throw std::domain_error("theta: domain capped at |beta| <= 3.9");
  long double sum = 0.0L;
  for (long j = 1; j <= trunc.n_max; ++j) {
    const double root = std::sqrt(4.0 * j * j - beta);
    sum -= 1.0 / (j * root * (2.0 * j + root));
    if (j >= 2) {
      const double tail = 0.0769 / (static_cast<double>(j) * j);
      if (tail <= trunc.tol) return {static_cast<double>(sum), tail, j};
    }
  }
  truncation_fail("theta", 0.0769 / (static_cast<double>(trunc.n_max) * trunc.n_max));
}

double theta(double beta, SeriesTruncation trunc) { return theta_v(beta, trunc).value; }

double theta_taylor_coeff(int j) {
  if (j < 1) throw std::domain_error("theta_taylor_coeff: j >= 1");
  // b_j = (2j-1)!!/(8^j j!), b_1 = 1/8, b_{j+1} = b_j (2j+1)/(8(j+1))
  double b = 0.125;
  for (int i = 1; i < j; ++i) b *= (2.0 * i + 1.0) / (8.0 * (i + 1.0));
  return -b * zeta_odd(j);
}

double theta_taylor(double beta, int terms) {
  if (terms < 1) throw std::domain_error("theta_taylor: terms >= 1");
  long double sum = 0.0L;
  double b = 0.125;
  double pow_beta = 1.0;
  for (int j = 1; j <= terms; ++j) {
    sum -= b * zeta_odd(j) * pow_beta;
    pow_beta *= beta;
    b *= (2.0 * j + 1.0) / (8.0 * (j + 1.0));
  }
  return static_cast<double>(sum);
}

double theta_taylor_deriv(double beta, int terms) {
  if (terms < 2) return 0.0;
  long double sum = 0.0L;
  double b = 0.125 * 3.0 / 16.0;  // b_2
  double pow_beta = 1.0;
  for (int j = 2; j <= terms; ++j) {
    sum -= b * zeta_odd(j) * (j - 1.0) * pow_beta;
    pow_beta *= beta;
    b *= (2.0 * j + 1.0) / (8.0 * (j + 1.0));
  }
  return static_cast<double>(sum);
}

// ---------------------------------------------------------------------------
// cutoff

namespace {

// smooth step N(u) = g(u)/(g(u)+g(1-u)), g(v) = exp(-1/v) on v > 0
struct StepEval {
  double n, d1, d2;
};

StepEval step(double u) {
  if (u <= 0.0) return {0.0, 0.0, 0.0};
  if (u >= 1.0) return {1.0, 0.0, 0.0};
  const double v = 1.0 - u;
  const double P = std::exp(-1.0 / u);
  const double Q = std::exp(-1.0 / v);
  const double Pp = P / (u * u);
  const double Qp = -Q / (v * v);
  const double Ppp = P / (u * u * u * u) - 2.0 * P / (u * u * u);
  const double Qpp = Q / (v * v * v * v) - 2.0 * Q / (v * v * v);
  const double s = P + Q;
  const double n = P / s;
  const double d1 = (Pp * Q - P * Qp) / (s * s);
  const double d2 = (Ppp * Q - P * Qpp) / (s * s) -
                    2.0 * (Pp * Q - P * Qp) * (Pp + Qp) / (s * s * s);
  return {n, d1, d2};
}

}  // namespace

double cutoff(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 1.5) return 0.0;
  return step(3.0 - 2.0 * t).n;
}

double cutoff_d1(double t) {
  if (t <= 1.0 || t >= 1.5) return 0.0;
  return -2.0 * step(3.0 - 2.0 * t).d1;
}

double cutoff_d2(double t) {
  if (t <= 1.0 || t >= 1.5) return 0.0;
  return 4.0 * step(3.0 - 2.0 * t).d2;
}

}  // namespace stripwave::layers
