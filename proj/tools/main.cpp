// Command-line driver: parameter sweeps over the analytic modules and the
// finite-element cell solver, with CSV/JSON reports.

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "stripwave/band.hpp"
#include "stripwave/cell_fem.hpp"
#include "stripwave/corrector.hpp"
#include "stripwave/fitting.hpp"
#include "stripwave/homogenized.hpp"
#include "stripwave/layers.hpp"
#include "stripwave/params.hpp"

using nlohmann::json;
using namespace stripwave;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_exit = 0;  // raised to 2 on hard-assertion failures

void hard_assert(bool ok, const std::string& what) {
  if (!ok) {
    std::cerr << "assertion failed: " << what << "\n";
    g_exit = 2;
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<double> grid(const json& cfg, const std::string& key,
                         std::vector<double> fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto& v = cfg.at(key);
  if (v.is_number()) return {v.get<double>()};
  std::vector<double> out = v.get<std::vector<double>>();
  if (out.empty()) throw config_error("config: empty grid for '" + key + "'");
  return out;
}

struct Csv {
  std::ostream& os;
  explicit Csv(std::ostream& s) : os(s) {}
  void comment(const std::string& line) { os << "# " << line << "\n"; }
  void header(const std::vector<std::string>& cols) {
    for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << "\n";
  }
};

struct Output {
  std::ofstream file;
  std::ostream& stream() { return file.is_open() ? file : std::cout; }
  void open(const std::string& path) {
    if (path.empty()) return;
    file.open(path, std::ios::binary);
    if (!file) throw config_error("cannot open output path: " + path);
  }
};

void preamble(Csv& csv, const json& cfg, const std::string& tags) {
  csv.comment("config-hash: " + std::to_string(fnv1a(cfg.dump())));
  csv.comment("checks: " + tags);
}

// ---------------------------------------------------------------------------

int cmd_homog(const json& cfg, std::ostream& os) {
  Csv csv(os);
  preamble(csv, cfg, "robin-eigenvalue-residual,taylor-diff");
  csv.header({"mu", "n", "lambda", "lambda_taylor", "diff", "residual"});
  const auto mus = grid(cfg, "mu", {0.0, 0.01, 0.1, 1.0, 10.0});
  const auto ns = grid(cfg, "n", {1, 2, 3});
  for (double mu : mus)
    for (double nd : ns) {
      const int n = static_cast<int>(nd);
      try {
        const double lam = homogenized::lambda_n(mu, n);
        const double tay = homogenized::lambda_n_taylor(mu, n);
        const double s = std::sqrt(lam);
        const double res = s * std::cos(s * kPi) + mu * std::sin(s * kPi);
        hard_assert(std::abs(res) <= 1e-12, "homog: residual above 1e-12");
        csv.row({fmt(mu), std::to_string(n), fmt(lam), fmt(tay), fmt(lam - tay), fmt(res)});
      } catch (const std::exception& e) {
        csv.row({fmt(mu), std::to_string(n), "error", e.what(), "", ""});
      }
    }
  return 0;
}

int cmd_theta(const json& cfg, std::ostream& os) {
  Csv csv(os);
  preamble(csv, cfg, "theta-dual-series,origin-identity");
  csv.header({"beta", "theta_series", "theta_taylor", "z_at_origin", "identity_residual"});
  std::vector<double> betas = grid(cfg, "beta", {});
  if (betas.empty())
    for (int i = 0; i <= 30; ++i) betas.push_back(-1.5 + 3.0 * i / 30.0);
  SeriesTruncation trunc{cfg.value("tol", 1e-12), cfg.value("n_max", 1000000L)};
  for (double beta : betas) {
    try {
      const double th = layers::theta(beta, trunc);
      const double tt = layers::theta_taylor(beta, 30);
      std::string zcol = "", rcol = "";
      if (beta >= 0.0 && std::sqrt(beta) < 2.0) {
        const double z = layers::helmholtz_layer_origin(std::sqrt(beta), trunc);
        zcol = fmt(z);
        rcol = fmt(z - beta * th);
        hard_assert(std::abs(z - beta * th) <= 1e-10, "theta: origin identity residual");
      }
      hard_assert(std::abs(th - tt) <= 1e-10, "theta: dual series disagree");
      csv.row({fmt(beta), fmt(th), fmt(tt), zcol, rcol});
    } catch (const std::exception& e) {
      csv.row({fmt(beta), "error", e.what(), "", ""});
    }
  }
  return 0;
}

int cmd_expand(const json& cfg, std::ostream& os) {
  Csv csv(os);
  preamble(csv, cfg, "structural-zeros,recursion-vs-closed-form");
  csv.header({"mu", "j", "k_series", "k_closed", "rel_diff", "abs_a1", "abs_a2",
              "abs_a4", "lambda_eps"});
  const auto mus = grid(cfg, "mu", {0.05, 0.2, 0.5});
  const int J = cfg.value("order", 8);
  const double eps_spot = cfg.value("eps_spot", 0.1);
  for (double mu : mus) {
    try {
      const auto ex = band::bottom_series(mu, J);
      const double a1 = std::abs(ex.a.size() > 1 ? ex.a[1] : 0.0);
      const double a2 = std::abs(ex.a.size() > 2 ? ex.a[2] : 0.0);
      const double a4 = std::abs(ex.a.size() > 4 ? ex.a[4] : 0.0);
      if (mu != 0.0) {
        hard_assert(a1 <= 1e-10 && a2 <= 1e-10 && a4 <= 1e-10,
                    "expand: structural zeros violated");
      }
      const double spot = band::bottom_eigenvalue(eps_spot, mu);
      for (int j = 3; j <= J; ++j) {
        if (j == 4 || mu == 0.0) continue;
        std::string kc = "", rd = "";
        if (j <= 8) {
          const double closed = band::bottom_coefficient_closed(j, mu);
          kc = fmt(closed);
          const double rel = std::abs(ex.K.at(j) - closed) / std::max(1e-300, std::abs(closed));
          rd = fmt(rel);
          hard_assert(rel <= 1e-8, "expand: recursion disagrees with closed form");
        }
        csv.row({fmt(mu), std::to_string(j), fmt(ex.K.at(j)), kc, rd, fmt(a1), fmt(a2),
                 fmt(a4), fmt(spot)});
      }
      if (mu == 0.0)
        csv.row({fmt(mu), "0", "", "", "", fmt(a1), fmt(a2), fmt(a4), fmt(spot)});
    } catch (const std::exception& e) {
      csv.row({fmt(mu), "error", e.what(), "", "", "", "", "", ""});
    }
  }
  return 0;
}

// schedule of (epsilon, ln_eta) pairs from the config
std::vector<std::pair<double, double>> schedule(const json& cfg) {
  const auto eps = grid(cfg, "epsilon", {0.4, 0.2, 0.1});
  std::vector<double> lne;
  if (cfg.contains("mu")) {
    const auto mus = grid(cfg, "mu", {});
    if (mus.size() != eps.size())
      throw config_error("config: mu and epsilon grids must pair up");
    for (size_t i = 0; i < eps.size(); ++i) lne.push_back(-1.0 / (eps[i] * mus[i]));
  } else if (cfg.contains("ln_eta")) {
    lne = grid(cfg, "ln_eta", {});
  } else {
    std::vector<double> etas = grid(cfg, "eta", {1e-3, 1e-8, 1e-14});
    for (double e : etas) lne.push_back(std::log(e));
  }
  if (lne.size() != eps.size())
    throw config_error("config: eta/ln_eta and epsilon grids must pair up");
  std::vector<std::pair<double, double>> out;
  for (size_t i = 0; i < eps.size(); ++i) out.emplace_back(eps[i], lne[i]);
  return out;
}

// nodes of the tensor mesh, or the cell rectangles of the patch mesh
void export_mesh(const std::string& path, const cell::CellConfig& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open mesh output path: " + path);
  Csv csv(out);
  if (cell::patch_backend(c)) {
    const auto pm = cell::build_patch_mesh(c);
    csv.comment("patch mesh cells (level grid indices)");
    csv.header({"level", "ix", "iy"});
    for (const auto& cell : pm.cells)
      csv.row({std::to_string(cell.level), std::to_string(cell.ix),
               std::to_string(cell.iy)});
  } else {
    const auto mesh = cell::build_mesh(c);
    csv.comment("tensor mesh nodes");
    csv.header({"axis", "coordinate"});
    for (double y : mesh.y) csv.row({"y1", fmt(y)});
    for (double x : mesh.x) csv.row({"x2", fmt(x)});
  }
}

cell::CellConfig cell_config(const json& cfg, double eps, double ln_eta) {
  cell::CellConfig c;
  c.epsilon = eps;
  c.ln_eta = ln_eta;
  c.kappa = cfg.value("kappa", 0.5);
  c.base_div = cfg.value("base_div", 10);
  c.grade_ratio = cfg.value("grade_ratio", 0.5);
  const std::string backend = cfg.value("backend", "auto");
  if (backend == "tensor") c.backend = cell::MeshBackend::Tensor;
  if (backend == "patch") c.backend = cell::MeshBackend::Patch;
  if (cfg.value("full_dirichlet", false)) c.full_dirichlet = true;
  if (cfg.value("neumann_bottom", false)) c.neumann_bottom = true;
  return c;
}

int cmd_band(const json& cfg, std::ostream& os, int levels) {
  Csv csv(os);
  preamble(csv, cfg, "band-bracketing,homogenized-limit,tau-argmin");
  csv.header({"eps", "ln_eta", "mu_eff", "tau", "n", "shifted_extrap", "shifted_finest",
              "rate", "lambda_n_mu", "diff", "bracket", "error"});
  const int k = cfg.value("modes", 1);
  const auto taus = grid(cfg, "tau", {0.0});
  std::vector<double> diffs, envelope;
  bool mesh_dumped = false;
  for (const auto& [eps, lne] : schedule(cfg)) {
    cell::CellConfig c = cell_config(cfg, eps, lne);
    if (cfg.contains("mesh_out") && !mesh_dumped) {
      export_mesh(cfg.at("mesh_out").get<std::string>(), c);
      mesh_dumped = true;
    }
    const auto pts = cell::band_function(c, taus, k, levels);
    // effective mu after any lattice snap
    double mu_eff = 0.0;
    if (!c.full_dirichlet && !c.neumann_bottom)
      mu_eff = cell::patch_backend(c) ? cell::build_patch_mesh(c).mu_snapped
                                      : -1.0 / (eps * lne);
    double argmin_tau = 0.0, min_lam = 1e300;
    for (const auto& pt : pts) {
      if (!pt.error.empty()) {
        csv.row({fmt(eps), fmt(lne), fmt(mu_eff), fmt(pt.tau), "", "", "", "", "", "",
                 "", pt.error});
        continue;
      }
      for (int n = 1; n <= k; ++n) {
        const double lam_n = c.full_dirichlet ? static_cast<double>(n) * n
                             : c.neumann_bottom
                                 ? (n - 0.5) * (n - 0.5)
                                 : homogenized::lambda_n(mu_eff, n);
        const double diff = pt.shifted[n - 1] - lam_n;
        csv.row({fmt(eps), fmt(lne), fmt(mu_eff), fmt(pt.tau), std::to_string(n),
                 fmt(pt.shifted[n - 1]), fmt(pt.shifted_finest[n - 1]),
                 fmt(pt.rates[n - 1]), fmt(lam_n), fmt(diff),
                 pt.bracket_ok ? "1" : "0", ""});
        if (n == 1 && pt.tau == 0.0 && !c.full_dirichlet && !c.neumann_bottom) {
          diffs.push_back(std::abs(diff));
          envelope.push_back(std::sqrt(eps) * mu_eff + eps);
        }
      }
      hard_assert(pt.bracket_ok, "band: bracketing violated");
      if (cfg.value("per_level", false)) {
        for (size_t l = 0; l < pt.per_level.size(); ++l)
          csv.comment("level " + std::to_string(l) + " tau=" + fmt(pt.tau) +
                      " shifted_lambda_1=" + fmt(pt.per_level[l]));
      }
      const double full = pt.shifted[0] + pt.tau * pt.tau / (eps * eps);
      if (full < min_lam) {
        min_lam = full;
        argmin_tau = pt.tau;
      }
    }
    if (taus.size() >= 3) {
      csv.comment("tau-argmin eps=" + fmt(eps) + ": " + fmt(argmin_tau));
      hard_assert(std::abs(argmin_tau) < 1e-12, "band: tau argmin is not 0");
    }
  }
  if (diffs.size() >= 3) {
    try {
      const auto fit = fitting::fit_rate(envelope, diffs);
      csv.comment("ratefit |lam1 - Lambda_1| vs sqrt(eps)*mu + eps: exponent=" +
                  fmt(fit.exponent) + " prefactor=" + fmt(fit.prefactor) +
                  " r2=" + fmt(fit.r2));
    } catch (const std::exception& e) {
      csv.comment(std::string("ratefit skipped: ") + e.what());
    }
  }
  return 0;
}

int cmd_corrector(const json& cfg, std::ostream& os) {
  const auto eps_grid = grid(cfg, "epsilon", {0.1, 0.2, 0.4});
  const auto eta_grid = grid(cfg, "eta", {1e-4, 1e-6, 1e-8});
  const auto alpha_grid = grid(cfg, "alpha", {0.75});
  json report;
  report["points"] = json::array();
  double cmin = 1e300, cmax = 0.0;
  for (double alpha : alpha_grid)
    for (double eps : eps_grid)
      for (double eta : eta_grid) {
        json pt;
        pt["epsilon"] = eps;
        pt["eta"] = eta;
        pt["alpha"] = alpha;
        try {
          const auto p = corrector::CorrectorParams::from_model(
              ModelParams::from_eta(eps, eta, 0.0, 0.5, alpha));
          const auto rep = corrector::verify(p);
          pt["dirichlet_residual"] = rep.max_dirichlet_residual;
          pt["neumann_residual"] = rep.max_neumann_residual;
          pt["harmonic_residual"] = rep.max_harmonic_residual;
          pt["junction_exponent"] = rep.junction_exponent;
          pt["junction_r2"] = rep.junction_r2;
          pt["max_laplacian"] = rep.max_laplacian;
          pt["laplacian_envelope_coeff"] = rep.laplacian_envelope_coeff;
          hard_assert(rep.max_dirichlet_residual <= 1e-12,
                      "corrector: window residual above 1e-12");
          hard_assert(rep.max_neumann_residual <= 1e-10,
                      "corrector: Neumann residual above 1e-10");
          cmin = std::min(cmin, rep.laplacian_envelope_coeff);
          cmax = std::max(cmax, rep.laplacian_envelope_coeff);
        } catch (const std::exception& e) {
          pt["error"] = e.what();
        }
        report["points"].push_back(pt);
      }
  report["envelope_coeff_min"] = cmin;
  report["envelope_coeff_max"] = cmax;
  report["envelope_coeff_stable_2x"] = (cmax <= 2.0 * cmin);
  report["config_hash"] = std::to_string(fnv1a(cfg.dump()));
  os << report.dump(2) << "\n";
  return 0;
}

int cmd_resolvent(const json& cfg, std::ostream& os, int levels, unsigned seed) {
  Csv csv(os);
  preamble(csv, cfg, "resolvent-discrepancy,apriori-bounds,perp-bound,value-at-zero");
  csv.header({"eps", "ln_eta", "mu_eff", "tau", "dofs", "discrepancy", "max_ratio_l2",
              "max_ratio_dx2", "max_ratio_dx1", "perp_ratio", "bounds_ok", "error"});
  const double tau = cfg.value("tau", 0.5);
  const int nrhs = cfg.value("rhs_count", 100);
  for (const auto& [eps, lne] : schedule(cfg)) {
    cell::CellConfig c = cell_config(cfg, eps, lne);
    c.tau = tau;
    try {
      cell::CellSystem sys;
      if (cell::patch_backend(c)) {
        sys = cell::assemble(cell::build_patch_mesh(c, std::max(0, levels - 2)), c);
      } else {
        cell::CellMesh mesh = cell::build_mesh(c);
        for (int l = 2; l < levels; ++l) mesh = mesh.refined();
        sys = cell::assemble(mesh, c);
      }
      const double mu = sys.mu_effective;
      const auto cmp = cell::resolvent_compare(
          sys, [&](double x2) { return homogenized::eigenfunction(1, mu, x2); }, mu);

      std::mt19937 rng(seed);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      double r1 = 0.0, r2 = 0.0, r3 = 0.0;
      bool ok = true;
      for (int it = 0; it < nrhs; ++it) {
        Eigen::VectorXcd f(sys.n_dof);
        for (int i = 0; i < sys.n_dof; ++i) f[i] = cell::cplx(u(rng), u(rng));
        const auto U = cell::shifted_solve(sys, f);
        const auto rep = cell::sanity_bounds(sys, U, f);
        ok = ok && rep.ok;
        r1 = std::max(r1, rep.ratio_l2);
        r2 = std::max(r2, rep.ratio_dx2);
        r3 = std::max(r3, rep.ratio_dx1);
      }
      // mean-zero datum: analytic profile, projected exactly on the tensor
      // backend
      Eigen::VectorXcd fp =
          sys.nodal([](double y1, double x2) {
               return std::cos(2.0 * y1) * std::sin(0.5 * x2);
             })
              .cast<cell::cplx>();
      if (!sys.physical) sys.remove_y_mean(fp);
      const auto Up = cell::shifted_solve(sys, fp);
      const double perp = sys.norm_M(Up) / sys.norm_M(fp);
      const double perp_bound = eps / std::sqrt(c.kappa) +
                                (sys.physical ? 5e-3 : 1e-9);  // interp leakage
      hard_assert(ok, "resolvent: a-priori bounds violated");
      hard_assert(perp <= perp_bound, "resolvent: mean-zero bound violated");
      // |Q_mu^{-1}F(0)| <= 5||F|| on random sampled data
      std::mt19937 rng2(seed + 1);
      for (int it = 0; it < 20; ++it) {
        homogenized::SampledFunction1D F;
        for (int i = 0; i < 33; ++i) {
          F.grid.push_back(kPi * i / 32.0);
          F.values.push_back(u(rng2));
        }
        hard_assert(std::abs(homogenized::value_at_zero(F, mu)) <=
                        5.0 * homogenized::l2_norm(F),
                    "resolvent: value-at-zero bound violated");
      }
      csv.row({fmt(eps), fmt(lne), fmt(mu), fmt(tau), std::to_string(sys.n_dof),
               fmt(cmp.discrepancy), fmt(r1), fmt(r2), fmt(r3), fmt(perp),
               ok ? "1" : "0", ""});
    } catch (const std::exception& e) {
      csv.row({fmt(eps), fmt(lne), "", fmt(tau), "", "", "", "", "", "", "0", e.what()});
    }
  }
  return 0;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config: " + path);
  json cfg = json::parse(in);
  if (!cfg.is_object()) throw config_error("config must be a JSON object");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"waveguide homogenization toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_path;
  int levels = 3;
  unsigned seed = 1;
  app.add_option("--config", config_path, "JSON config path");
  app.add_option("--out", out_path, "output path (default stdout)");
  app.add_option("--levels", levels, "mesh refinement levels");
  app.add_option("--seed", seed, "seed for random data");

  auto* homog = app.add_subcommand("homog", "homogenized Robin eigenvalues");
  auto* theta = app.add_subcommand("theta", "theta series cross-checks");
  auto* expand = app.add_subcommand("expand", "bottom-of-spectrum series");
  auto* band = app.add_subcommand("band", "cell band functions vs homogenized");
  auto* corr = app.add_subcommand("corrector", "boundary corrector verification");
  auto* reso = app.add_subcommand("resolvent", "cell resolvent vs homogenized inverse");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const json cfg = load_config(config_path);
    if (cfg.contains("levels")) levels = cfg.at("levels").get<int>();
    Output out;
    out.open(out_path);
    if (homog->parsed()) cmd_homog(cfg, out.stream());
    if (theta->parsed()) cmd_theta(cfg, out.stream());
    if (expand->parsed()) cmd_expand(cfg, out.stream());
    if (band->parsed()) cmd_band(cfg, out.stream(), levels);
    if (corr->parsed()) cmd_corrector(cfg, out.stream());
    if (reso->parsed()) cmd_resolvent(cfg, out.stream(), levels, seed);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return g_exit;
}
