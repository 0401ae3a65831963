#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "stripwave/homogenized.hpp"

using namespace stripwave;
using namespace stripwave::homogenized;

namespace {

constexpr double kPi = 3.14159265358979323846;

// independent oracle: plain bisection on s cos(pi s) + mu sin(pi s) over
// s in [n - 1/2, n], no Newton polish
double lambda_bisect(double mu, int n) {
  auto f = [&](double s) { return s * std::cos(s * kPi) + mu * std::sin(s * kPi); };
  double lo = n - 0.5, hi = n - 1e-12;
  if (mu == 0.0) return lo * lo;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(lo) * f(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  const double s = 0.5 * (lo + hi);
  return s * s;
}

SampledFunction1D sampled(const std::function<double(double)>& f, int n = 201) {
  SampledFunction1D out;
  for (int i = 0; i < n; ++i) {
    const double x = kPi * i / (n - 1);
    out.grid.push_back(x);
    out.values.push_back(f(x));
  }
  return out;
}

}  // namespace

TEST_CASE("lambda_n values") {
  CHECK(lambda_n(0.0, 1) == 0.25);
  CHECK(lambda_n(0.0, 2) == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(lambda_n(0.1, 1) == doctest::Approx(lambda_bisect(0.1, 1)).epsilon(1e-12));
  CHECK(lambda_n(100.0, 1) == doctest::Approx(lambda_bisect(100.0, 1)).epsilon(1e-12));
  CHECK(lambda_n(0.1, 1) == doctest::Approx(0.309800).epsilon(1e-5));
  CHECK(lambda_n(100.0, 1) == doctest::Approx(0.9936642789854818).epsilon(1e-10));
  CHECK_THROWS_AS(lambda_n(0.1, 0), std::domain_error);
  CHECK_THROWS_AS(lambda_n(-0.2, 1), std::domain_error);
}

TEST_CASE("lambda_n residual and bracketing") {
  for (double mu : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0})
    for (int n = 1; n <= 10; ++n) {
      const double L = lambda_n(mu, n);
      const double s = std::sqrt(L);
      const double res = s * std::cos(s * kPi) + mu * std::sin(s * kPi);
      CHECK(std::abs(res) <= 1e-12);
      CHECK(L >= 0.0);
      CHECK(L <= static_cast<double>(n) * n);
    }
}

TEST_CASE("lambda_n monotone in mu") {
  for (int n = 1; n <= 3; ++n) {
    double prev = lambda_n(0.0, n);
    for (double mu : {1e-3, 1e-2, 0.1, 0.5, 1.0, 5.0, 20.0, 100.0}) {
      const double L = lambda_n(mu, n);
      CHECK(L > prev);
      prev = L;
    }
  }
}

TEST_CASE("lambda_n taylor consistency") {
  CHECK(lambda_n_taylor(0.0, 2) == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(lambda_n_taylor(0.1, 1) == doctest::Approx(0.25 + 0.2 / kPi).epsilon(1e-15));
  // (Lambda - Taylor)/mu^2 bounded and sign-stable
  double prev_ratio = 0.0;
  for (double mu : {1e-2, 1e-3, 1e-4}) {
    const double ratio = (lambda_n(mu, 1) - lambda_n_taylor(mu, 1)) / (mu * mu);
    CHECK(std::abs(ratio) < 10.0);
    if (prev_ratio != 0.0) {
      CHECK(ratio * prev_ratio > 0.0);
      CHECK(ratio == doctest::Approx(prev_ratio).epsilon(0.05));
    }
    prev_ratio = ratio;
  }
}

TEST_CASE("eigenfunction boundary conditions") {
  CHECK(eigenfunction(1, 0.0, kPi) == doctest::Approx(0.0));
  CHECK(eigenfunction(1, 0.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
  // Robin condition u'(0) = mu u(0) from the closed form
  for (double mu : {0.1, 1.0, 10.0})
    for (int n : {1, 2}) {
      const double s = std::sqrt(lambda_n(mu, n));
      const double up0 = s * std::cos(-s * kPi);
      const double u0 = std::sin(-s * kPi);
      CHECK(std::abs(up0 - mu * u0) <= 1e-10 * std::max(1.0, mu));
    }
}

TEST_CASE("green kernel") {
  CHECK(green_kernel(0.0, 1.0, 0.0) == doctest::Approx(kPi - 1.0).epsilon(1e-15));
  CHECK(green_kernel(1.0, 2.0, 0.0) == doctest::Approx(kPi - 2.0).epsilon(1e-15));
  CHECK(green_kernel(0.0, 0.0, 1.0) == doctest::Approx(kPi / (1.0 + kPi)).epsilon(1e-15));
  // symmetric, zero at x2 = pi, Robin at 0
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, kPi);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng), mu = u(rng);
    CHECK(green_kernel(a, b, mu) == green_kernel(b, a, mu));
    CHECK(green_kernel(kPi, b, mu) == 0.0);
    const double h = 1e-7;
    if (b > 0.1) {
      const double d = (green_kernel(h, b, mu) - green_kernel(0.0, b, mu)) / h;
      CHECK(d == doctest::Approx(mu * green_kernel(0.0, b, mu)).epsilon(1e-5));
    }
  }
}

TEST_CASE("apply_inverse solves the two-point problem") {
  // F == 1, mu = 0: u = (pi^2 - x^2)/2
  const auto u0 = apply_inverse(sampled([](double) { return 1.0; }), 0.0);
  for (size_t i = 0; i < u0.grid.size(); ++i) {
    const double x = u0.grid[i];
    CHECK(u0.values[i] == doctest::Approx((kPi * kPi - x * x) / 2.0).epsilon(1e-9));
  }
  CHECK(u0.values.front() == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-10));

  // F == 1, mu = 1: u(0) = pi^2/(2 (1+pi))
  const auto u1 = apply_inverse(sampled([](double) { return 1.0; }), 1.0);
  CHECK(u1.values.front() ==
        doctest::Approx(kPi * kPi / (2.0 * (1.0 + kPi))).epsilon(1e-10));

  // eigen-relation u = F / Lambda_1
  const double mu = 0.7;
  const double L1 = lambda_n(mu, 1);
  const auto f = sampled([&](double x) { return eigenfunction(1, mu, x); }, 401);
  const auto uf = apply_inverse(f, mu);
  for (size_t i = 0; i < f.grid.size(); i += 37)
    CHECK(uf.values[i] == doctest::Approx(f.values[i] / L1).epsilon(1e-4));

  CHECK_THROWS_AS(apply_inverse({{0.0, kPi}, {1.0, 1.0}}, 0.0), std::exception);
}

TEST_CASE("apply_inverse second difference recovers -F") {
  const auto F = sampled([](double x) { return std::sin(x) + 0.3 * x; }, 801);
  const auto u = apply_inverse(F, 0.5);
  const double h = u.grid[1] - u.grid[0];
  for (size_t i = 40; i + 40 < u.grid.size(); i += 61) {
    const double d2 = (u.values[i + 1] - 2.0 * u.values[i] + u.values[i - 1]) / (h * h);
    CHECK(-d2 == doctest::Approx(F.values[i]).epsilon(5e-4));
  }
}

TEST_CASE("value_at_zero bound |u(0)| <= 5 ||F||") {
  // analytic cross-checks
  const auto ones = sampled([](double) { return 1.0; });
  CHECK(value_at_zero(ones, 0.0) == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-10));
  CHECK(value_at_zero(ones, 0.0) <= 5.0 * l2_norm(ones));

  const auto zero = sampled([](double) { return 0.0; });
  CHECK(value_at_zero(zero, 3.0) == 0.0);

  // eigenfunction case: u(0) = F(0)/Lambda_1(0) = -1/0.25
  const auto f = sampled([](double x) { return eigenfunction(1, 0.0, x); }, 401);
  CHECK(value_at_zero(f, 0.0) == doctest::Approx(-4.0).epsilon(1e-5));
  CHECK(std::abs(value_at_zero(f, 0.0)) <= 5.0 * l2_norm(f));

  // random piecewise-linear F
  std::mt19937 rng(321);
  std::uniform_real_distribution<double> amp(-3.0, 3.0);
  std::uniform_real_distribution<double> mus(0.0, 10.0);
  for (int iter = 0; iter < 1000; ++iter) {
    SampledFunction1D F;
    const int nn = 33;
    for (int i = 0; i < nn; ++i) {
      F.grid.push_back(kPi * i / (nn - 1));
      F.values.push_back(amp(rng));
    }
    const double muv = mus(rng);
    CHECK(std::abs(value_at_zero(F, muv)) <= 5.0 * l2_norm(F));
  }
}
