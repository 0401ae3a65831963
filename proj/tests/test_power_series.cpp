#include <doctest.h>

#include <cmath>
#include <random>

#include "stripwave/power_series.hpp"

using namespace stripwave::series;

TEST_CASE("series basics") {
  const auto c = PowerSeries::constant(0.25, 4);
  CHECK(c[0] == 0.25);
  CHECK(c[3] == 0.0);
  CHECK(c.eval(0.7) == 0.25);

  // (1 + t)(1 - t) = 1 - t^2
  PowerSeries a(2), b(2);
  a[0] = 1.0;
  a[1] = 1.0;
  b[0] = 1.0;
  b[1] = -1.0;
  const auto p = mul(a, b);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
  CHECK(p[2] == -1.0);

  const auto sh = a.shifted(1);
  CHECK(sh[0] == 0.0);
  CHECK(sh[1] == 1.0);
  CHECK(sh[2] == 1.0);
}

TEST_CASE("sqrt of a constant series") {
  const auto s = sqrt(PowerSeries::constant(0.25, 5));
  CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-16));
  for (int j = 1; j <= 5; ++j) CHECK(s[j] == 0.0);
  CHECK_THROWS_AS(sqrt(PowerSeries::constant(-1.0, 2)), std::domain_error);
}

TEST_CASE("division recurrence") {
  // (1 - t^3) / (1 - t) = 1 + t + t^2
  PowerSeries num(4), den(4);
  num[0] = 1.0;
  num[3] = -1.0;
  den[0] = 1.0;
  den[1] = -1.0;
  const auto q = div(num, den);
  CHECK(q[0] == doctest::Approx(1.0));
  CHECK(q[1] == doctest::Approx(1.0));
  CHECK(q[2] == doctest::Approx(1.0));
  CHECK(q[3] == doctest::Approx(0.0));
  CHECK(q[4] == doctest::Approx(0.0));
  CHECK_THROWS_AS(div(num, PowerSeries(4)), std::domain_error);
}

TEST_CASE("compose cos(pi sqrt(s)) via chain rule oracle") {
  // s(t) = 0.25 + t: d/dt cos(pi sqrt(s)) at t=0 equals -pi
  PowerSeries s(1);
  s[0] = 0.25;
  s[1] = 1.0;
  const auto c = cos(sqrt(s) * 3.14159265358979323846);
  CHECK(c[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(c[1] == doctest::Approx(-3.14159265358979323846).epsilon(1e-14));
}

TEST_CASE("nonlinear series ops match scalar derivatives") {
  // f(t) = values of the composite series must reproduce the scalar function
  // to O(t^{J+1}); checked with divided differences at small t
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  const int J = 6;
  PowerSeries s(J);
  s[0] = 0.8;
  for (int j = 1; j <= J; ++j) s[j] = u(rng);
  auto scalar = [&](double t) {
    const double v = s.eval(t);
    return std::sin(v) * std::sqrt(v) + std::cos(v);
  };
  const auto composite = mul(sin(s), sqrt(s)) + cos(s);
  for (double t : {1e-2, 5e-3, 2.5e-3}) {
    const double err = std::abs(composite.eval(t) - scalar(t));
    CHECK(err <= 10.0 * std::pow(t, J + 1) + 1e-14);
  }
}

TEST_CASE("order mismatch throws") {
  CHECK_THROWS_AS(mul(PowerSeries(2), PowerSeries(3)), std::domain_error);
  CHECK_THROWS_AS(PowerSeries(2) + PowerSeries(3), std::domain_error);
}
