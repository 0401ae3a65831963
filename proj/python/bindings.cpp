#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stripwave/band.hpp"
#include "stripwave/cell_fem.hpp"
#include "stripwave/corrector.hpp"
#include "stripwave/fitting.hpp"
#include "stripwave/homogenized.hpp"
#include "stripwave/layers.hpp"
#include "stripwave/params.hpp"

namespace py = pybind11;
using namespace stripwave;

namespace {

SeriesTruncation trunc_of(double tol, long n_max) { return {tol, n_max}; }

// eigenvalues of the periodicity cell with Richardson extrapolation
py::dict cell_eigenvalues(double epsilon, double ln_eta, double tau, int k,
                          int levels, int base_div, bool full_dirichlet,
                          bool neumann_bottom, const std::string& backend) {
  cell::CellConfig cfg;
  cfg.epsilon = epsilon;
  cfg.ln_eta = ln_eta;
  cfg.base_div = base_div;
  cfg.full_dirichlet = full_dirichlet;
  cfg.neumann_bottom = neumann_bottom;
  cfg.kappa = std::min(0.5, 1.0 - std::abs(tau));
  if (backend == "tensor") cfg.backend = cell::MeshBackend::Tensor;
  if (backend == "patch") cfg.backend = cell::MeshBackend::Patch;
  const auto pts = cell::band_function(cfg, {tau}, k, levels);
  if (!pts[0].error.empty()) throw std::runtime_error(pts[0].error);
  py::dict out;
  out["shifted"] = pts[0].shifted;
  out["shifted_finest"] = pts[0].shifted_finest;
  out["rates"] = pts[0].rates;
  out["bracket_ok"] = pts[0].bracket_ok;
  double mu_eff = 0.0;
  if (!full_dirichlet && !neumann_bottom)
    mu_eff = cell::patch_backend(cfg) ? cell::build_patch_mesh(cfg).mu_snapped
                                      : -1.0 / (epsilon * ln_eta);
  out["mu_effective"] = mu_eff;
  return out;
}

py::dict corrector_verify(double epsilon, double eta, double alpha) {
  const auto p = corrector::CorrectorParams::from_model(
      ModelParams::from_eta(epsilon, eta, 0.0, 0.5, alpha));
  const auto rep = corrector::verify(p);
  py::dict out;
  out["dirichlet_residual"] = rep.max_dirichlet_residual;
  out["neumann_residual"] = rep.max_neumann_residual;
  out["harmonic_residual"] = rep.max_harmonic_residual;
  out["junction_exponent"] = rep.junction_exponent;
  out["junction_r2"] = rep.junction_r2;
  out["max_laplacian"] = rep.max_laplacian;
  out["laplacian_envelope_coeff"] = rep.laplacian_envelope_coeff;
  return out;
}

}  // namespace

PYBIND11_MODULE(_stripwave, m) {
  m.doc() = "homogenization toolkit for a waveguide with frequently "
            "alternating boundary conditions";

  // parameters
  m.def("mu_from", &mu_from, py::arg("epsilon"), py::arg("eta"),
        "Robin coefficient -1/(eps ln eta)");
  m.def("eta_from", &eta_from, py::arg("epsilon"), py::arg("mu"));
  m.def("zeta_odd", &zeta_odd, py::arg("j"), "zeta(2j+1)");
  m.def(
      "classify_regime",
      [](double epsilon, double eta, double threshold) {
        const auto r = classify_regime(ModelParams::from_eta(epsilon, eta), threshold);
        return py::make_tuple(regime_name(r.tag), r.indicator);
      },
      py::arg("epsilon"), py::arg("eta"), py::arg("threshold") = 5.0);

  // layer functions
  m.def(
      "strip_layer",
      [](double x1, double x2) { return layers::strip_layer({x1, x2}); },
      py::arg("xi1"), py::arg("xi2"));
  m.def(
      "window_layer",
      [](double s1, double s2) { return layers::window_layer({s1, s2}); },
      py::arg("sigma1"), py::arg("sigma2"));
  m.def(
      "helmholtz_layer",
      [](double x1, double x2, double beta, double tol, long n_max) {
        return layers::helmholtz_layer({x1, x2}, beta, trunc_of(tol, n_max));
      },
      py::arg("xi1"), py::arg("xi2"), py::arg("beta"), py::arg("tol") = 1e-12,
      py::arg("n_max") = 1000000);
  m.def(
      "theta",
      [](double beta, double tol, long n_max) {
        return layers::theta(beta, trunc_of(tol, n_max));
      },
      py::arg("beta"), py::arg("tol") = 1e-12, py::arg("n_max") = 1000000);
  m.def("theta_taylor", &layers::theta_taylor, py::arg("beta"), py::arg("terms") = 30);
  m.def(
      "z_at_origin",
      [](double beta, double tol, long n_max) {
        return layers::helmholtz_layer_origin(beta, trunc_of(tol, n_max));
      },
      py::arg("beta"), py::arg("tol") = 1e-12, py::arg("n_max") = 1000000);
  m.def("cutoff", &layers::cutoff, py::arg("t"));

  // homogenized 1-D model
  m.def("lambda_n", &homogenized::lambda_n, py::arg("mu"), py::arg("n"));
  m.def("lambda_n_taylor", &homogenized::lambda_n_taylor, py::arg("mu"), py::arg("n"));
  m.def("eigenfunction", &homogenized::eigenfunction, py::arg("n"), py::arg("mu"),
        py::arg("x2"));
  m.def("green_kernel", &homogenized::green_kernel, py::arg("x2"), py::arg("t"),
        py::arg("mu"));
  m.def(
      "apply_inverse",
      [](std::vector<double> grid, std::vector<double> values, double mu) {
        homogenized::SampledFunction1D F{std::move(grid), std::move(values)};
        return homogenized::apply_inverse(F, mu).values;
      },
      py::arg("grid"), py::arg("values"), py::arg("mu"));

  // bottom of the spectrum
  m.def(
      "secular",
      [](double eps, double mu, double lam, double tol, long n_max) {
        return band::secular(eps, mu, lam, trunc_of(tol, n_max));
      },
      py::arg("eps"), py::arg("mu"), py::arg("lam"), py::arg("tol") = 1e-12,
      py::arg("n_max") = 1000000);
  m.def("bottom_eigenvalue", &band::bottom_eigenvalue, py::arg("eps"), py::arg("mu"));
  m.def(
      "bottom_series",
      [](double mu, int order) {
        const auto ex = band::bottom_series(mu, order);
        py::dict out;
        out["lambda1"] = ex.lambda1;
        out["a"] = ex.a;
        py::dict K;
        for (const auto& [j, v] : ex.K) K[py::int_(j)] = v;
        out["K"] = K;
        return out;
      },
      py::arg("mu"), py::arg("order") = 8);
  m.def("bottom_coefficient_closed", &band::bottom_coefficient_closed, py::arg("j"),
        py::arg("mu"));
  m.def("band_value", &band::band_value, py::arg("n"), py::arg("tau"), py::arg("eps"),
        py::arg("mu"), py::arg("refined") = false);
  m.def(
      "composite_mode",
      [](double x1, double x2, double eps, double mu, double eta) {
        band::CompositeMode mode(eps, mu, eta);
        return mode({x1, x2});
      },
      py::arg("x1"), py::arg("x2"), py::arg("eps"), py::arg("mu"), py::arg("eta"));

  // corrector
  m.def(
      "corrector_value",
      [](double x1, double x2, double eps, double eta, double alpha) {
        const auto p = corrector::CorrectorParams::from_model(
            ModelParams::from_eta(eps, eta, 0.0, 0.5, alpha));
        return corrector::value({x1, x2}, p);
      },
      py::arg("x1"), py::arg("x2"), py::arg("eps"), py::arg("eta"),
      py::arg("alpha") = 0.75);
  m.def("corrector_verify", &corrector_verify, py::arg("epsilon"), py::arg("eta"),
        py::arg("alpha") = 0.75);

  // cell eigensolver
  m.def("cell_eigenvalues", &cell_eigenvalues, py::arg("epsilon"),
        py::arg("ln_eta") = 0.0, py::arg("tau") = 0.0, py::arg("k") = 1,
        py::arg("levels") = 3, py::arg("base_div") = 8,
        py::arg("full_dirichlet") = false, py::arg("neumann_bottom") = false,
        py::arg("backend") = "auto");

  py::class_<SeriesTruncation>(m, "SeriesTruncation")
      .def(py::init<>())
      .def_readwrite("tol", &SeriesTruncation::tol)
      .def_readwrite("n_max", &SeriesTruncation::n_max);
}
