#include <doctest.h>

#include <cmath>
#include <random>

#include "stripwave/corrector.hpp"
#include "stripwave/layers.hpp"

using namespace stripwave;
using namespace stripwave::corrector;

namespace {

constexpr double kPi = 3.14159265358979323846;

CorrectorParams params(double eps, double eta, double alpha = 0.75) {
  return CorrectorParams::from_model(
      ModelParams::from_eta(eps, eta, 0.0, 0.5, alpha));
}

}  // namespace

TEST_CASE("region classification") {
  const auto p = params(0.2, 1e-6);
  CHECK(classify({0.0, 0.0}, p).region == Region::Internal);
  CHECK(classify({0.0, 0.0}, p).window == 0);
  // |sigma| eta^alpha = 1.25 -> transition
  const double ring = std::exp((1.0 - p.alpha) * p.ln_eta);
  CHECK(classify({1.25 * ring * p.epsilon, 0.0}, p).region == Region::Transition);
  CHECK(classify({p.epsilon * kPi / 2.0, 1.0}, p).region == Region::External);
  // window of the third period
  const auto tag = classify({3.0 * kPi * p.epsilon, 0.0}, p);
  CHECK(tag.region == Region::Internal);
  CHECK(tag.window == 3);
  // rings never overlap for eta < 1: the transition radius is below 3/2
  CHECK(1.5 * std::exp((1.0 - p.alpha) * p.ln_eta) < kPi / 2.0);
}

TEST_CASE("corrector boundary values") {
  const auto p = params(0.2, 1e-6);
  // W = -1 on the window; Y(0) = 0 at the center
  for (double s : {-0.9, -0.3, 0.0, 0.4, 0.99})
    CHECK(value({s * p.epsilon * p.eta, 0.0}, p) == doctest::Approx(-1.0).epsilon(1e-13));
  // internal branch example: sigma = (0, 1)
  const double w = value({0.0, p.epsilon * p.eta}, p);
  const double expect = -1.0 + p.epsilon * p.mu * std::log(1.0 + std::sqrt(2.0)) -
                        p.mu * p.epsilon * p.eta;
  CHECK(w == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("corrector Neumann data is exact") {
  const auto p = params(0.2, 1e-6);
  // all three regions on the bottom edge
  for (double f : {1e-6, 1e-4, 0.01, 0.3, 0.8, 1.0}) {
    const double x1 = p.epsilon * (p.eta + f * (kPi / 2.0 - p.eta));
    const auto g = gradient({x1, 0.0}, p);
    CHECK(g[1] == -p.mu);  // exactly
  }
}

TEST_CASE("external region is exactly the scaled strip layer") {
  const auto p = params(0.2, 1e-6);
  for (double x1 : {0.05, 0.2, 0.3})
    for (double x2 : {0.0, 0.5, 2.0}) {
      if (classify({x1, x2}, p).region != Region::External) continue;
      const double w = value({x1, x2}, p);
      const double ref = p.epsilon * p.mu *
                         layers::strip_layer({x1 / p.epsilon, x2 / p.epsilon});
      CHECK(w == ref);  // bitwise: the same expression
    }
  // top of the strip: exponentially small
  const double top = value({0.1, kPi}, p);
  const double bound = p.epsilon * p.mu * 2.0 * std::exp(-2.0 * kPi / p.epsilon) /
                       (1.0 - std::exp(-2.0 * kPi / p.epsilon));
  CHECK(std::abs(top) <= bound);
}

TEST_CASE("corrector periodicity and evenness") {
  const auto p = params(0.2, 1e-4);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ux(-0.5 * kPi * p.epsilon, 0.5 * kPi * p.epsilon);
  std::uniform_real_distribution<double> uy(0.0, kPi);
  for (int i = 0; i < 200; ++i) {
    const double x1 = ux(rng), x2 = uy(rng);
    const double w = value({x1, x2}, p);
    CHECK(value({x1 + p.epsilon * kPi, x2}, p) == doctest::Approx(w).epsilon(1e-13));
    CHECK(value({-x1, x2}, p) == doctest::Approx(w).epsilon(1e-13));
  }
}

TEST_CASE("corrector gradient matches finite differences across regions") {
  const auto p = params(0.2, 1e-4);
  const double ring = std::exp((1.0 - p.alpha) * p.ln_eta);
  const std::vector<Point2> pts = {
      {0.25 * p.epsilon, 0.8},                               // external
      {0.0, 0.5 * ring * p.epsilon},                         // internal
      {1.2 * ring * p.epsilon * 0.6, 1.2 * ring * p.epsilon * 0.8},  // transition
  };
  for (const auto& c : pts) {
    const auto g = gradient(c, p);
    const double h = 1e-7 * std::max(1e-3, std::hypot(c.c1, c.c2));
    const double d1 = (value({c.c1 + h, c.c2}, p) - value({c.c1 - h, c.c2}, p)) / (2.0 * h);
    const double d2 = (value({c.c1, c.c2 + h}, p) - value({c.c1, c.c2 - h}, p)) / (2.0 * h);
    CHECK(g[0] == doctest::Approx(d1).epsilon(1e-5));
    CHECK(g[1] == doctest::Approx(d2).epsilon(1e-5));
  }
}

TEST_CASE("laplacian vanishes off the ring and matches stencils on it") {
  const auto p = params(0.2, 1e-4);
  const double ring = std::exp((1.0 - p.alpha) * p.ln_eta);
  CHECK(laplacian({0.25 * p.epsilon, 0.8}, p) == 0.0);
  CHECK(laplacian({0.0, 0.4 * ring * p.epsilon}, p) == 0.0);
  // transition: compare the analytic Laplacian against shrinking stencils
  const Point2 c{1.2 * ring * p.epsilon * 0.6, 1.2 * ring * p.epsilon * 0.8};
  const double lap = laplacian(c, p);
  CHECK(lap != 0.0);
  const double scale = ring * p.epsilon;
  auto stencil = [&](double h) {
    return (value({c.c1 + h, c.c2}, p) + value({c.c1 - h, c.c2}, p) +
            value({c.c1, c.c2 + h}, p) + value({c.c1, c.c2 - h}, p) -
            4.0 * value(c, p)) /
           (h * h);
  };
  const double e1 = std::abs(stencil(scale / 100.0) - lap);
  const double e2 = std::abs(stencil(scale / 200.0) - lap);
  CHECK(e2 < 0.5 * e1 + 1e-9);
  CHECK(e2 <= 0.05 * std::max(std::abs(lap), p.mu / p.epsilon));
}

TEST_CASE("verify report on a parameter grid") {
  for (double eps : {0.1, 0.2})
    for (double lg : {-4.0, -6.0}) {
      const auto p = params(eps, std::pow(10.0, lg));
      const auto rep = verify(p);
      CHECK(rep.max_dirichlet_residual <= 1e-12);
      CHECK(rep.max_neumann_residual <= 1e-10);
      CHECK(rep.junction_exponent > 0.45);
      CHECK(rep.junction_exponent < 0.55);
      CHECK(rep.max_laplacian > 0.0);
    }
  // harmonicity bound needs the window scale within stencil reach
  const auto rep = verify(params(0.2, 1e-4));
  CHECK(rep.max_harmonic_residual <= 1e-4);
}

TEST_CASE("laplacian envelope coefficient is stable on a 3x3 grid") {
  double cmin = 1e300, cmax = 0.0;
  for (double eps : {0.1, 0.2, 0.4})
    for (double lg : {-4.0, -6.0, -8.0}) {
      const auto rep = verify(params(eps, std::pow(10.0, lg)));
      cmin = std::min(cmin, rep.laplacian_envelope_coeff);
      cmax = std::max(cmax, rep.laplacian_envelope_coeff);
    }
  CHECK(cmax / cmin <= 2.0);
}
