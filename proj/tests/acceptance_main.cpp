// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "stripwave/band.hpp"
#include "stripwave/cell_fem.hpp"
#include "stripwave/corrector.hpp"
#include "stripwave/fitting.hpp"
#include "stripwave/homogenized.hpp"
#include "stripwave/layers.hpp"
#include "stripwave/params.hpp"

using namespace stripwave;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Criterion {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double now_s() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Criterion criterion1() {
  Criterion c;
  c.require(homogenized::lambda_n(0.0, 1) == 0.25, "Lambda_1(0) != 1/4");
  for (double mu : {0.0, 0.01, 0.1, 1.0, 10.0})
    for (int n = 1; n <= 5; ++n) {
      const double s = std::sqrt(homogenized::lambda_n(mu, n));
      const double res = s * std::cos(s * kPi) + mu * std::sin(s * kPi);
      c.require(std::abs(res) <= 1e-12, "secular residual above 1e-12");
    }
  std::vector<double> ratios;
  for (double mu : {1e-2, 1e-3, 1e-4})
    ratios.push_back(
        std::abs(homogenized::lambda_n(mu, 1) - 0.25 - 2.0 * mu / kPi) / (mu * mu));
  const double rmin = std::min({ratios[0], ratios[1], ratios[2]});
  const double rmax = std::max({ratios[0], ratios[1], ratios[2]});
  c.require(rmax <= 1.1 * rmin, "two-term remainder ratio drifts beyond 10%");
  return c;
}

Criterion criterion2() {
  Criterion c;
  SeriesTruncation tight{1e-13, 1000000};
  SeriesTruncation mid{1e-11, 1000000};
  for (int i = 0; i < 50; ++i) {
    const double beta = -1.0 + 2.0 * i / 49.0;
    c.require(std::abs(layers::theta(beta, mid) - layers::theta_taylor(beta, 30)) <=
                  1e-10,
              "theta dual-series mismatch");
  }
  c.require(std::abs(layers::theta(0.0, tight) + zeta_odd(1) / 8.0) <= 1e-12,
            "theta(0) != -zeta(3)/8 within 1e-12");
  for (double beta : {0.1, 0.5, 1.0, 1.5}) {
    const double lhs = layers::helmholtz_layer_origin(beta, mid);
    const double rhs = beta * beta * layers::theta(beta * beta, mid);
    c.require(std::abs(lhs - rhs) <= 1e-10, "origin identity residual above 1e-10");
  }
  return c;
}

Criterion criterion3() {
  Criterion c;
  SeriesTruncation t{1e-12, 1000000};
  for (double x1 : {0.0, 0.4, 1.0, kPi / 2.0, 2.5})
    for (double x2 : {0.1, 0.3, 1.0, 3.0})
      c.require(std::abs(layers::strip_layer_series({x1, x2}, t) -
                         layers::strip_layer({x1, x2})) <= 1e-11,
                "series vs closed form above 1e-11");
  for (double x1 : {0.1, 0.8, 2.0, 3.0})
    c.require(layers::strip_layer_grad({x1, 0.0})[1] == -1.0,
              "boundary slope not exactly -1");
  for (double s1 : {0.0, 0.5, -0.9})
    c.require(layers::window_layer({s1, 0.0}) == 0.0, "window value not exactly 0");
  auto lap = [](const std::function<double(Point2)>& f, Point2 p, double h) {
    return (f({p.c1 + h, p.c2}) + f({p.c1 - h, p.c2}) + f({p.c1, p.c2 + h}) +
            f({p.c1, p.c2 - h}) - 4.0 * f(p)) /
           (h * h);
  };
  for (double x1 : {0.5, 1.5})
    for (double x2 : {0.4, 1.2}) {
      c.require(std::abs(lap([](Point2 p) { return layers::strip_layer(p); },
                             {x1, x2}, 1e-3)) <= 1e-4,
                "strip layer harmonicity above 1e-4");
      c.require(std::abs(lap([](Point2 p) { return layers::window_layer(p); },
                             {x1, x2}, 1e-3)) <= 1e-4,
                "window profile harmonicity above 1e-4");
    }
  const double beta = 1.0;
  for (double x1 : {0.5, 1.2})
    for (double x2 : {0.4, 0.9}) {
      const Point2 p{x1, x2};
      const double r =
          lap([&](Point2 q) { return layers::helmholtz_layer(q, beta, t); }, p, 1e-3) +
          beta * beta * layers::helmholtz_layer(p, beta, t) +
          beta * beta * layers::strip_layer(p);
      c.require(std::abs(r) <= 1e-3, "helmholtz PDE residual above 1e-3");
    }
  return c;
}

Criterion criterion4() {
  Criterion c;
  for (double mu : {0.05, 0.2, 0.5}) {
    const auto ex = band::bottom_series(mu, 8);
    c.require(std::abs(ex.a[1]) <= 1e-10 && std::abs(ex.a[2]) <= 1e-10 &&
                  std::abs(ex.a[4]) <= 1e-10,
              "structural zeros above 1e-10");
    for (int j = 3; j <= 8; ++j) {
      if (j == 4) continue;
      const double closed = band::bottom_coefficient_closed(j, mu);
      c.require(std::abs(ex.K.at(j) - closed) <= 1e-8 * std::abs(closed),
                "recursion vs closed form above 1e-8 relative");
    }
  }
  {
    const double mu = 0.5;
    const auto ex = band::bottom_series(mu, 9);
    for (int J : {3, 5}) {
      std::vector<double> epss = {0.1, 0.05, 0.025}, errs;
      for (double eps : epss) {
        double sum = 0.0;
        for (int j = 0; j <= J; ++j) sum += ex.a[j] * std::pow(eps, j);
        errs.push_back(std::abs(sum - band::bottom_eigenvalue(eps, mu)));
      }
      const auto fit = fitting::fit_rate(epss, errs);
      c.require(fit.exponent >= J + 0.8, "partial-sum order below J+0.8");
    }
  }
  for (double eps : {0.1, 0.3}) {
    const double d = 1e-4;
    const double fd =
        (band::bottom_eigenvalue(eps, d) - band::bottom_eigenvalue(eps, -d)) / (2.0 * d);
    c.require(std::abs(fd - 2.0 / kPi) <= 1e-6, "d Lambda/d mu at 0 is not 2/pi");
  }
  return c;
}

Criterion criterion5() {
  Criterion c;
  const auto p = corrector::CorrectorParams::from_model(
      ModelParams::from_eta(0.2, 1e-6, 0.0, 0.5, 0.75));
  const auto rep = corrector::verify(p);
  c.require(rep.max_dirichlet_residual <= 1e-12, "window residual above 1e-12");
  c.require(rep.max_neumann_residual <= 1e-10, "Neumann residual above 1e-10");
  c.require(rep.junction_exponent >= 0.45 && rep.junction_exponent <= 0.55,
            "junction exponent outside [0.45, 0.55]");
  // external identity: the evaluation is literally eps*mu*X there
  for (double x1 : {0.05, 0.25})
    for (double x2 : {0.0, 1.0, 2.5}) {
      if (corrector::classify({x1, x2}, p).region != corrector::Region::External)
        continue;
      const double w = corrector::value({x1, x2}, p);
      const double ref =
          p.epsilon * p.mu * layers::strip_layer({x1 / p.epsilon, x2 / p.epsilon});
      c.require(w == ref, "external region identity broken");
    }
  // harmonicity with the window scale inside stencil reach
  const auto p2 = corrector::CorrectorParams::from_model(
      ModelParams::from_eta(0.2, 1e-4, 0.0, 0.5, 0.75));
  c.require(corrector::verify(p2).max_harmonic_residual <= 1e-4,
            "stencil harmonicity above 1e-4");
  return c;
}

cell::CellConfig calib(double eps, bool full, bool neumann, double tau = 0.0) {
  cell::CellConfig cfg;
  cfg.epsilon = eps;
  cfg.full_dirichlet = full;
  cfg.neumann_bottom = neumann;
  cfg.tau = tau;
  cfg.kappa = full || neumann ? 0.5 : 0.5;
  cfg.base_div = 8;
  return cfg;
}

Criterion criterion6() {
  Criterion c;
  {
    const auto pts = cell::band_function(calib(0.1, true, false), {0.0}, 1, 3);
    c.require(pts[0].error.empty() && std::abs(pts[0].shifted[0] - 1.0) <= 1e-3,
              "full-Dirichlet lambda_1 != 1 within 1e-3");
  }
  {
    const auto pts = cell::band_function(calib(0.1, false, true), {0.0}, 1, 3);
    c.require(pts[0].error.empty() && std::abs(pts[0].shifted[0] - 0.25) <= 1e-3,
              "Neumann-bottom lambda_1 != 1/4 within 1e-3");
  }
  {
    const auto pts = cell::band_function(calib(0.1, true, false, 0.5), {0.5}, 1, 3);
    const double lam = pts[0].shifted[0] + 25.0;
    c.require(pts[0].error.empty() && std::abs(lam - 26.0) <= 3e-2,
              "tau=0.5 calibration lambda_1 != 26 within 3e-2");
  }
  return c;
}

Criterion criterion7(std::string& extra) {
  Criterion c;
  std::vector<double> diffs;
  char buf[160];
  for (auto [eps, lg] : {std::pair{0.4, -3.0}, {0.2, -8.0}, {0.1, -14.0}}) {
    cell::CellConfig cfg;
    cfg.epsilon = eps;
    cfg.ln_eta = lg * std::log(10.0);
    cfg.base_div = 8;
    // the bounded-aspect patch backend resolves all three windows with the
    // same method; four nested levels put the Aitken value well inside the
    // measured differences
    cfg.backend = cell::MeshBackend::Patch;
    const auto pts = cell::band_function(cfg, {0.0}, 1, 4);
    if (!pts[0].error.empty()) {
      c.require(false, "band point failed: " + pts[0].error);
      continue;
    }
    const double mu_eff = cell::build_patch_mesh(cfg).mu_snapped;
    const double diff = pts[0].shifted[0] - homogenized::lambda_n(mu_eff, 1);
    diffs.push_back(std::abs(diff));
    c.require(pts[0].bracket_ok, "bracketing violated");
    std::snprintf(buf, sizeof(buf), " (eps=%.1f: |diff|=%.2e)", eps, std::abs(diff));
    extra += buf;
  }
  c.require(diffs.size() == 3 && diffs[0] >= diffs[1] && diffs[1] >= diffs[2],
            "|lambda_1 - Lambda_1| not nonincreasing along the schedule");
  // tau sweep: argmin at 0
  cell::CellConfig cfg;
  cfg.epsilon = 0.2;
  cfg.ln_eta = -8.0 * std::log(10.0);
  cfg.base_div = 8;
  cfg.kappa = 0.2;
  const auto pts = cell::band_function(cfg, {-0.8, -0.4, 0.0, 0.4, 0.8}, 1, 1);
  double best_tau = -1.0, best = 1e300;
  for (const auto& pt : pts) {
    c.require(pt.error.empty(), "tau sweep point failed");
    if (pt.error.empty()) {
      const double lam = pt.shifted_finest[0] + pt.tau * pt.tau / (0.2 * 0.2);
      if (lam < best) {
        best = lam;
        best_tau = pt.tau;
      }
    }
  }
  c.require(best_tau == 0.0, "tau argmin is not 0");
  return c;
}

Criterion criterion8(std::string& extra) {
  Criterion c;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double prev = 1e300;
  char buf[160];
  for (auto [eps, lg] : {std::pair{0.4, -3.0}, {0.2, -8.0}, {0.1, -14.0}}) {
    cell::CellConfig cfg;
    cfg.epsilon = eps;
    cfg.ln_eta = lg * std::log(10.0);
    cfg.base_div = 8;
    cfg.tau = 0.5;
    cfg.kappa = 0.5;
    cell::CellSystem sys;
    if (cell::patch_backend(cfg))
      sys = cell::assemble(cell::build_patch_mesh(cfg, 1), cfg);
    else
      sys = cell::assemble(cell::build_mesh(cfg).refined(), cfg);
    const double mu = sys.mu_effective;
    const auto cmp = cell::resolvent_compare(
        sys, [&](double x2) { return homogenized::eigenfunction(1, mu, x2); }, mu);
    c.require(cmp.discrepancy < prev, "discrepancy not decreasing");
    prev = cmp.discrepancy;
    std::snprintf(buf, sizeof(buf), " (eps=%.1f: disc=%.2e)", eps, cmp.discrepancy);
    extra += buf;

    for (int it = 0; it < 100; ++it) {
      Eigen::VectorXcd f(sys.n_dof);
      for (int i = 0; i < sys.n_dof; ++i) f[i] = cell::cplx(u(rng), u(rng));
      const auto rep = cell::sanity_bounds(sys, cell::shifted_solve(sys, f), f);
      c.require(rep.ok, "a-priori norm bound violated");
    }
    // mean-zero data: 100 random x2-profiles carried by cos(2 y1), which has
    // zero mean over the period; the tensor backend additionally projects the
    // interpolant exactly
    for (int it = 0; it < 100; ++it) {
      std::vector<double> g(40);
      for (double& v : g) v = u(rng);
      Eigen::VectorXcd fp = sys.nodal([&](double y1, double x2) {
                                 const double t = x2 / kPi * (g.size() - 1);
                                 const int i = std::min<int>(g.size() - 2,
                                                             std::max(0, (int)t));
                                 const double w = t - i;
                                 return std::cos(2.0 * y1) *
                                        ((1.0 - w) * g[i] + w * g[i + 1]);
                               })
                                .cast<cell::cplx>();
      if (!sys.physical) sys.remove_y_mean(fp);
      const double ratio =
          sys.norm_M(cell::shifted_solve(sys, fp)) / sys.norm_M(fp);
      c.require(ratio <= eps / std::sqrt(cfg.kappa) + (sys.physical ? 5e-3 : 1e-9),
                "mean-zero bound violated");
    }
    // |Q_mu^{-1} F(0)| <= 5 ||F||
    for (int it = 0; it < 100; ++it) {
      homogenized::SampledFunction1D F;
      for (int i = 0; i < 33; ++i) {
        F.grid.push_back(kPi * i / 32.0);
        F.values.push_back(u(rng));
      }
      c.require(std::abs(homogenized::value_at_zero(F, mu)) <=
                    5.0 * homogenized::l2_norm(F),
                "value-at-zero bound violated");
    }
  }
  return c;
}

Criterion criterion9(std::string& extra) {
  Criterion c;
  const double mu_target = 0.31;
  char buf[200];
  double dist_prev_eps = 1e300;
  for (double eps : {0.2, 0.1}) {
    cell::CellConfig cfg;
    cfg.epsilon = eps;
    cfg.ln_eta = -1.0 / (eps * mu_target);
    cfg.base_div = 8;
    const bool patch = cell::patch_backend(cfg);
    double dist_prev = 1e300, dist = 0.0, lam1 = 0.0;
    double mu_eff = 0.0, eta_eff = 0.0;
    for (int l = 0; l < 2; ++l) {
      cell::CellSystem sys;
      if (patch)
        sys = cell::assemble(cell::build_patch_mesh(cfg, l), cfg);
      else {
        cell::CellMesh mesh = cell::build_mesh(cfg);
        for (int i = 0; i < l; ++i) mesh = mesh.refined();
        sys = cell::assemble(mesh, cfg);
      }
      mu_eff = sys.mu_effective;
      eta_eff = sys.eta_effective;
      band::CompositeMode mode(eps, mu_eff, eta_eff, {1e-9, 1000000});
      const auto res = cell::solve_eigs(sys, 1);
      const auto d = cell::compare_ground_mode(sys, res, [&](double y1, double x2) {
        return mode({y1 * eps, x2});
      });
      c.require(d.l2 < dist_prev, "L2 distance not decreasing under refinement");
      dist_prev = d.l2;
      dist = d.l2 / d.ref_norm;
      lam1 = res.eigenvalues[0];
    }
    c.require(dist < dist_prev_eps, "L2 distance not decreasing with eps");
    dist_prev_eps = dist;
    // recorded without thresholds: the exponential remainder is below
    // discretization accuracy by construction
    const double lam_full = band::bottom_eigenvalue(eps, mu_eff);
    const double lam_homog = homogenized::lambda_n(mu_eff, 1);
    std::snprintf(buf, sizeof(buf),
                  " (eps=%.1f: rel_dist=%.2e, lam1-L(eps,mu)=%.2e, lam1-L1(mu)=%.2e)",
                  eps, dist, lam1 - lam_full, lam1 - lam_homog);
    extra += buf;
  }
  return c;
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int idx, const char* name, Criterion c,
                          const std::string& extra = "") {
    const double t = now_s();
    std::printf("[%s] criterion %d: %s%s%s%s (t=%.1fs)\n", c.ok ? "PASS" : "FAIL", idx,
                name, extra.c_str(), c.detail.empty() ? "" : " -- ",
                c.detail.c_str(), t);
    std::fflush(stdout);
    if (!c.ok) ++failures;
  };

  report(1, "homogenized eigenvalues", criterion1());
  report(2, "theta identities", criterion2());
  report(3, "layer functions", criterion3());
  report(4, "bottom-of-spectrum series", criterion4());
  report(5, "boundary corrector", criterion5());
  report(6, "cell calibration spectra", criterion6());
  {
    std::string extra;
    const auto c = criterion7(extra);
    report(7, "homogenized band limit", c, extra);
  }
  {
    std::string extra;
    const auto c = criterion8(extra);
    report(8, "resolvent convergence and bounds", c, extra);
  }
  {
    std::string extra;
    const auto c = criterion9(extra);
    report(9, "ground-mode comparison", c, extra);
  }
  return failures;
}
