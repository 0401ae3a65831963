#include "stripwave/corrector.hpp"

#include <cmath>
#include <vector>

#include "stripwave/fitting.hpp"
#include "stripwave/layers.hpp"

namespace stripwave::corrector {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.69314718055994530942;

struct Local {
  long window;
  Point2 xi;       // centered fast coordinates, |xi1| <= pi/2
  double abs_xi;   // |xi|
  double ln_t;     // ln(|sigma| eta^alpha) = ln|xi| + (alpha-1) ln eta
};

Local localize(Point2 x, const CorrectorParams& p) {
  if (x.c2 < 0.0) throw std::domain_error("corrector: x2 must be >= 0");
  const double period = p.epsilon * kPi;
  const long j = std::llround(x.c1 / period);
  Local loc;
  loc.window = j;
  loc.xi = {(x.c1 - period * j) / p.epsilon, x.c2 / p.epsilon};
  loc.abs_xi = std::hypot(loc.xi.c1, loc.xi.c2);
  loc.ln_t = std::log(loc.abs_xi) + (p.alpha - 1.0) * p.ln_eta;
  return loc;
}

// window profile and its x-gradient in sigma = xi/eta coordinates, with the
// far-zone branch driven from log coordinates so sigma itself never overflows
double window_value(const Local& loc, const CorrectorParams& p) {
  const double ln_sigma = std::log(loc.abs_xi) - p.ln_eta;
  if (ln_sigma > 18.0)  // |sigma| > ~6.6e7: ln|sigma| + ln 2 to machine precision
    return kLn2 + ln_sigma;
  const double inv_eta = std::exp(-p.ln_eta);
  return layers::window_layer({loc.xi.c1 * inv_eta, loc.xi.c2 * inv_eta});
}

// gradient of Y(sigma(x)) w.r.t. x times eps (i.e. d/d xi of Y(xi/eta))
std::array<double, 2> window_grad_xi(const Local& loc, const CorrectorParams& p) {
  const double ln_sigma = std::log(loc.abs_xi) - p.ln_eta;
  if (ln_sigma > 18.0) {
    // grad_sigma Y ~ sigma/|sigma|^2, so d/d xi = xi/|xi|^2
    const double r2 = loc.abs_xi * loc.abs_xi;
    return {loc.xi.c1 / r2, loc.xi.c2 / r2};
  }
  const double inv_eta = std::exp(-p.ln_eta);
  const auto g = layers::window_layer_grad({loc.xi.c1 * inv_eta, loc.xi.c2 * inv_eta});
  return {g[0] * inv_eta, g[1] * inv_eta};
}

}  // namespace

CorrectorParams CorrectorParams::from_model(const ModelParams& p) {
  CorrectorParams c{p.epsilon, p.ln_eta, p.eta, p.mu, p.alpha};
  c.validate();
  return c;
}

void CorrectorParams::validate() const {
  if (!(epsilon > 0.0)) throw std::domain_error("CorrectorParams: epsilon > 0");
  if (!(ln_eta < 0.0)) throw std::domain_error("CorrectorParams: ln_eta < 0");
  if (!(alpha > 0.5 && alpha < 1.0))
    throw std::domain_error("CorrectorParams: alpha in (1/2, 1)");
  // transition rings of consecutive windows must not meet:
  // (3/2) eta^{1-alpha} < pi/2
  if (!(1.5 * std::exp((1.0 - alpha) * ln_eta) < kPi / 2.0))
    throw config_error("CorrectorParams: transition rings of adjacent windows overlap");
  const double mu_check = -1.0 / (epsilon * ln_eta);
  if (std::abs(mu - mu_check) > 1e-12 * std::max(1.0, mu))
    throw std::domain_error("CorrectorParams: mu inconsistent with -1/(eps ln eta)");
}

RegionTag classify(Point2 x, const CorrectorParams& p) {
  const Local loc = localize(x, p);
  Region r = Region::External;
  if (loc.ln_t < 0.0)
    r = Region::Internal;
  else if (loc.ln_t <= std::log(1.5))
    r = Region::Transition;
  return {r, (r == Region::External) ? 0 : loc.window,
          (r == Region::External) ? std::exp(std::min(loc.ln_t, 700.0)) : std::exp(loc.ln_t)};
}

double value(Point2 x, const CorrectorParams& p) {
  const Local loc = localize(x, p);
  const double em = p.epsilon * p.mu;
  if (loc.ln_t < 0.0)  // internal: no boundary-layer factor survives
    return -1.0 + em * window_value(loc, p) - p.mu * x.c2;
  const double X = layers::strip_layer(loc.xi);
  if (loc.ln_t > std::log(1.5)) return em * X;
  const double t = std::exp(loc.ln_t);
  const double w_mat = -1.0 + em * (window_value(loc, p) - X - loc.xi.c2);
  return em * X + layers::cutoff(t) * w_mat;
}

std::array<double, 2> gradient(Point2 x, const CorrectorParams& p) {
  const Local loc = localize(x, p);
  const double em = p.epsilon * p.mu;
  if (loc.ln_t < 0.0) {
    if (loc.xi.c2 == 0.0 && std::abs(std::abs(loc.xi.c1) - p.eta) == 0.0)
      throw singularity_error("corrector gradient: window endpoint");
    const auto gy = window_grad_xi(loc, p);
    return {p.mu * gy[0], p.mu * gy[1] - p.mu};
  }
  const auto gx = layers::strip_layer_grad(loc.xi);
  if (loc.ln_t > std::log(1.5)) return {p.mu * gx[0], p.mu * gx[1]};
  const double t = std::exp(loc.ln_t);
  const double X = layers::strip_layer(loc.xi);
  const double w_mat = -1.0 + em * (window_value(loc, p) - X - loc.xi.c2);
  const auto gy = window_grad_xi(loc, p);
  // grad_x W_mat = mu (grad_xi Y - grad_xi X - e2)
  const double gw1 = p.mu * (gy[0] - gx[0]);
  const double gw2 = p.mu * (gy[1] - gx[1] - 1.0);
  const double chi = layers::cutoff(t);
  const double chi1 = layers::cutoff_d1(t);
  // grad_x t = t * xi/|xi|^2 / eps
  const double gt_scale = t / (loc.abs_xi * p.epsilon);
  const double gt1 = gt_scale * loc.xi.c1 / loc.abs_xi;
  const double gt2 = gt_scale * loc.xi.c2 / loc.abs_xi;
  return {p.mu * gx[0] + chi1 * gt1 * w_mat + chi * gw1,
          p.mu * gx[1] + chi1 * gt2 * w_mat + chi * gw2};
}

double laplacian(Point2 x, const CorrectorParams& p) {
  const Local loc = localize(x, p);
  if (loc.ln_t < 0.0 || loc.ln_t > std::log(1.5)) return 0.0;
  const double em = p.epsilon * p.mu;
  const double t = std::exp(loc.ln_t);
  const double X = layers::strip_layer(loc.xi);
  const auto gx = layers::strip_layer_grad(loc.xi);
  const auto gy = window_grad_xi(loc, p);
  const double w_mat = -1.0 + em * (window_value(loc, p) - X - loc.xi.c2);
  const double gw1 = p.mu * (gy[0] - gx[0]);
  const double gw2 = p.mu * (gy[1] - gx[1] - 1.0);
  const double chi1 = layers::cutoff_d1(t);
  const double chi2 = layers::cutoff_d2(t);
  const double u1 = loc.xi.c1 / loc.abs_xi, u2 = loc.xi.c2 / loc.abs_xi;
  // |grad_x t|^2 = (t/(eps |xi|))^2, Delta_x t = t/(eps^2 |xi|^2)
  const double s = t / (p.epsilon * loc.abs_xi);
  const double delta_chi = chi2 * s * s + chi1 * s / (p.epsilon * loc.abs_xi);
  const double grad_dot = 2.0 * chi1 * s * (u1 * gw1 + u2 * gw2);
  return grad_dot + w_mat * delta_chi;
}

VerifyReport verify(const CorrectorParams& p, int n) {
  p.validate();
  VerifyReport rep;
  const double eps = p.epsilon;
  const double eta = p.eta;
  if (!(eta > 0.0))
    throw config_error("corrector verify: eta underflows double precision");

  // Dirichlet windows: W = -1 on {|x1| < eps*eta, x2 = 0}
  for (int i = 0; i < n; ++i) {
    const double s = -0.95 + 1.9 * i / (n - 1);
    const double w = value({s * eps * eta, 0.0}, p);
    rep.max_dirichlet_residual = std::max(rep.max_dirichlet_residual, std::abs(w + 1.0));
  }

  // Neumann part: dW/dx2 = -mu on {eps*eta < |x1| <= eps*pi/2, x2 = 0}
  for (int i = 0; i < n; ++i) {
    const double f = static_cast<double>(i + 1) / (n + 1);
    // geometric sweep from just outside the window to the cell edge
    const double x1 = eps * eta * std::pow(kPi / (2.0 * eta), f);
    const auto g = gradient({x1, 0.0}, p);
    rep.max_neumann_residual = std::max(rep.max_neumann_residual, std::abs(g[1] + p.mu));
  }

  // harmonicity off the transition ring: 5-point stencil; external points use
  // the period-scale step, internal points the window-scale step
  const auto stencil = [&](Point2 c, double h) {
    const double w0 = value(c, p);
    const double lap = (value({c.c1 + h, c.c2}, p) + value({c.c1 - h, c.c2}, p) +
                        value({c.c1, c.c2 + h}, p) + value({c.c1, c.c2 - h}, p) - 4.0 * w0) /
                       (h * h);
    return std::abs(lap);
  };
  for (int i = 1; i <= 8; ++i)
    for (int k = 1; k <= 4; ++k) {
      const double x1 = (i / 9.0 - 0.5) * eps * kPi;
      const double x2 = 0.3 + (kPi - 0.6) * k / 5.0;
      const Point2 c{x1, x2};
      if (classify(c, p).region == Region::External)
        rep.max_harmonic_residual = std::max(rep.max_harmonic_residual, stencil(c, 1e-3 * eps));
    }
  // Internal points sit just inside the ring, where the curvature scale is
  // the distance R to the window; the step must shrink with R to keep the
  // h^2 truncation of the stencil below the bound.
  const double r_in = 0.9 * std::exp((1.0 - p.alpha) * p.ln_eta);
  for (int k = 1; k <= 6; ++k) {
    const double ang = kPi * k / 7.0;
    const Point2 c{eps * r_in * std::cos(ang), eps * r_in * std::sin(ang)};
    rep.max_harmonic_residual =
        std::max(rep.max_harmonic_residual, stencil(c, 5e-4 * eps * r_in));
  }

  // junction behaviour: |W - W(junction)| ~ r^{1/2} along the vertical ray
  {
    std::vector<double> rs, ws;
    for (int i = 0; i < 12; ++i) {
      const double s = std::pow(10.0, -2.0 + 2.0 * i / 11.0);  // sigma2 in [0.01, 1]
      const double r = s * eps * eta;
      const double w = value({eps * eta, r}, p);
      rs.push_back(r);
      ws.push_back(std::abs(w + 1.0));
    }
    const auto fit = fitting::fit_rate(rs, ws);
    rep.junction_exponent = fit.exponent;
    rep.junction_r2 = fit.r2;
  }

  // Laplacian over the transition ring and the envelope mu/eps (1+eta^{4a-2})
  const double ring = std::exp((1.0 - p.alpha) * p.ln_eta);
  for (int i = 0; i < 9; ++i)
    for (int k = 1; k <= 7; ++k) {
      const double t = 1.02 + 0.46 * i / 8.0;
      const double ang = kPi * k / 8.0;
      const double r = eps * t * ring;
      const double lap =
          laplacian({r * std::cos(ang), r * std::sin(ang)}, p);
      rep.max_laplacian = std::max(rep.max_laplacian, std::abs(lap));
    }
  const double envelope =
      p.mu / eps * (1.0 + std::exp((4.0 * p.alpha - 2.0) * p.ln_eta));
  rep.laplacian_envelope_coeff = rep.max_laplacian / envelope;
  return rep;
}

}  // namespace stripwave::corrector
