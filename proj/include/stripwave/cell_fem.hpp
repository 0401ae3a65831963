#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "stripwave/common.hpp"
#include "stripwave/fitting.hpp"
#include "stripwave/homogenized.hpp"

namespace stripwave::cell {

// Finite-element eigensolver and resolvent solver for the periodicity-cell
// operator: rescaled coordinates (y1, x2) = (x1/eps, x2) on the fixed
// rectangle [-pi/2, pi/2] x [0, pi], bilinear elements on a tensor mesh,
// form  eps^{-2} |(i d/dy1 - tau) u|^2 + |d/dx2 u|^2,  Dirichlet on the top
// and on the bottom window |y1| <= eta, periodic in y1.

using cplx = std::complex<double>;
using SpMatD = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<cplx>;

// Two mesh backends serve the windowed cell.  The graded tensor mesh is
// simple and exact in eta but couples window-width columns with far-field
// rows, which drives the matrix scale like 1/(eps*eta); it is reliable down
// to eta ~ 1e-8.  Below that a balanced dyadic patch mesh (quadtree around
// the window, physical coordinates, bounded-aspect cells, hanging-node
// constraints) keeps all matrix entries O(1) at any window depth, at the
// price of snapping eta to the dyadic lattice (relative snap < 7%, the
// effective eta/mu are reported alongside).
enum class MeshBackend { Auto, Tensor, Patch };

struct CellConfig {
  double epsilon = 0.1;
  double ln_eta = -18.4;  // ln(eta); ignored for the two degenerate bottoms
  double tau = 0.0;
  double kappa = 0.5;
  bool full_dirichlet = false;  // eta = pi/2: Dirichlet along the whole bottom
  bool neumann_bottom = false;  // eta = 0: no Dirichlet window
  int base_div = 12;
  double grade_ratio = 0.5;  // geometric grading factor toward the window
  MeshBackend backend = MeshBackend::Auto;
  int dense_threshold = 1500;
  int lanczos_max = 240;
  double eig_residual_tol = 1e-8;
};

struct CellMesh {
  std::vector<double> y;  // node coordinates, y.front() = -pi/2, y.back() = pi/2
  std::vector<double> x;  // node coordinates in [0, pi]
  double eta = 0.0;       // window half-width (0 none, pi/2 full)
  bool full_dirichlet = false;
  bool neumann_bottom = false;
  int level = 0;

  CellMesh refined() const;  // bisect every interval
  double min_spacing() const;
};

// Tensor mesh: uniform far field, geometric layers toward y = +-eta and
// x2 = 0 (layer count ~ ln(1/eta)); +-eta are mesh nodes exactly.
CellMesh build_mesh(const CellConfig& cfg);

// Balanced dyadic patch mesh in physical coordinates: geometric cascade of
// square cells around the Dirichlet window plus a boundary-layer strip along
// the bottom, 2:1 balanced, hanging nodes resolved by midpoint constraints.
struct PatchCell {
  int level;
  long ix, iy;  // cell indices on the level grid
};

struct PatchMesh {
  std::vector<PatchCell> cells;
  int n1 = 2, n2 = 16;  // root grid (x1 by x2)
  int max_level = 0;
  double W = 0.0;             // half width eps*pi/2
  double eta_snapped = 0.0;   // window half-width after lattice snapping
  double mu_snapped = 0.0;    // -1/(eps ln eta_snapped)
  double epsilon = 0.0;
  int refinements = 0;  // global nested refinements applied

  PatchMesh refined() const;
};

PatchMesh build_patch_mesh(const CellConfig& cfg, int refinements = 0);

struct CellSystem {
  // Blocks on the free dofs (periodically merged, Dirichlet eliminated,
  // hanging nodes condensed).  Tensor backend: assembled in (y1, x2)
  // coordinates, K1 = (dy1 u, dy1 v).  Patch backend: physical coordinates,
  // K1 = (dx1 u, dx1 v).
  SpMatD K1;
  SpMatD K2;  // (dx2 u, dx2 v)
  SpMatD M;   // (u, v)
  SpMatD S;   // (u, d1 v) - (d1 u, v)   [antisymmetric]
  bool physical = false;
  double epsilon = 0.0, tau = 0.0, kappa = 0.5;
  double eta_effective = 0.0, mu_effective = 0.0;  // after any lattice snap
  int dense_threshold = 1500;
  int lanczos_max = 240;
  double eig_tol = 1e-8;
  int n_dof = 0;

  // physical coordinates of the dofs (y1 = x1/eps, x2)
  std::vector<double> node_y1, node_x2;

  // tensor backend only:
  int n_yu = 0, n_xn = 0;
  std::vector<int> dof;  // (iy * n_xn + ix) -> free index or -1
  std::vector<double> y_weight;
  CellMesh mesh;

  int dof_at(int iy, int ix) const { return dof[iy * n_xn + ix]; }
  SpMatC stiffness() const;
  SpMatD stiffness_real() const;  // tau = 0 only

  // interpolation of a function of (y1, x2) on the free dofs
  Eigen::VectorXd nodal(const std::function<double(double, double)>& f) const;
  // interpolation of a 1-D profile of x2, constant in y1
  Eigen::VectorXd profile(const std::function<double(double)>& f) const;

  double norm_M(const Eigen::VectorXcd& u) const;
  double norm_dx2(const Eigen::VectorXcd& u) const;
  double norm_dx1(const Eigen::VectorXcd& u) const;  // includes the 1/eps scale

  // project out the y1-mean row by row (weighted by y_weight), making the
  // interpolant exactly orthogonal to every x2-only function; tensor only
  void remove_y_mean(Eigen::VectorXcd& u) const;
};

CellSystem assemble(const CellMesh& mesh, const CellConfig& cfg);
CellSystem assemble(const PatchMesh& mesh, const CellConfig& cfg);

// backend selection per cfg (Auto: patch for windowed cells below eta ~ 1e-8)
bool patch_backend(const CellConfig& cfg);

struct SpectralResult {
  std::vector<double> eigenvalues;
  Eigen::MatrixXcd vectors;  // M-normalized columns
  std::vector<double> residuals;
  int mesh_level = 0;
  int dof_count = 0;
};

// lowest k eigenpairs; dense below cfg.dense_threshold dofs, otherwise
// shift-invert Lanczos with full reorthogonalization.  shift_hint < 0 means
// "use the bracketing floor tau^2/eps^2 + 0.2".
SpectralResult solve_eigs(const CellSystem& sys, int k, double shift_hint = -1.0);

struct BandPoint {
  double tau = 0.0;
  std::vector<double> shifted;         // extrapolated lambda_n - tau^2/eps^2
  std::vector<double> shifted_finest;  // finest level, conforming upper values
  std::vector<double> rates;           // fitted reduction exponents
  std::vector<double> per_level;       // shifted lambda_1 per mesh level
  bool bracket_ok = false;             // 1/4 <= shifted <= n^2 (+slack) where applicable
  std::string error;                   // per-point failure, empty on success
};

// Eigenvalue table over a tau grid with Richardson extrapolation over
// `levels` nested meshes.
std::vector<BandPoint> band_function(const CellConfig& cfg,
                                     const std::vector<double>& tau_grid, int k,
                                     int levels);

// solve (A - (tau^2/eps^2) M) U = M f for a free-dof datum f
Eigen::VectorXcd shifted_solve(const CellSystem& sys, const Eigen::VectorXcd& f);

struct ResolventComparison {
  double discrepancy = 0.0;  // ||U - Qmu^{-1}F||_M / ||F||_M
  double norm_U = 0.0;
  double norm_F = 0.0;
};

// F given as a 1-D profile on the mesh's x2 grid, extended constantly in y1;
// the reference is the homogenized inverse applied on the same grid.
ResolventComparison resolvent_compare(const CellSystem& sys,
                                      const std::function<double(double)>& F,
                                      double mu);

struct SanityReport {
  double ratio_l2 = 0.0;   // ||U||/||f||      (bound 4)
  double ratio_dx2 = 0.0;  // ||dU/dx2||/||f|| (bound 2)
  double ratio_dx1 = 0.0;  // ||dU/dx1||/||f|| (bound 2/sqrt(kappa))
  bool ok = false;
};

SanityReport sanity_bounds(const CellSystem& sys, const Eigen::VectorXcd& U,
                           const Eigen::VectorXcd& f);

struct ModeDistance {
  double l2 = 0.0;
  double h1 = 0.0;
  double ref_norm = 0.0;
};

// distance between the first computed eigenvector and a reference mode
// sampled at the nodes, after matching sign and scale to the reference
ModeDistance compare_ground_mode(const CellSystem& sys, const SpectralResult& res,
                                 const std::function<double(double, double)>& mode);

}  // namespace stripwave::cell
