#pragma once

#include <array>

#include "stripwave/common.hpp"
#include "stripwave/params.hpp"

namespace stripwave::corrector {

// The boundary corrector
//   W(x) = -mu x2 + eps mu (X(xi) + xi2) prod(1 - chi(|sigma_j| eta^a))
//          + sum_j chi(|sigma_j| eta^a) (-1 + eps mu Y(sigma_j)),
// evaluated in the grouped, cancellation-free form
//   W = eps mu X(xi) + chi(t) * W_mat,   W_mat = -1 + eps mu (Y - X - xi2),
// which is exact because eps mu xi2 == mu x2.  Periodicity reduces every x1
// to the nearest window; at most one cutoff factor is active (non-overlap).

struct CorrectorParams {
  double epsilon;
  double ln_eta;
  double eta;    // exp(ln_eta); may underflow, ln_eta stays authoritative
  double mu;     // = -1/(epsilon * ln_eta)
  double alpha;  // cutoff exponent in (1/2, 1)

  static CorrectorParams from_model(const ModelParams& p);
  void validate() const;
};

enum class Region { External, Internal, Transition };

struct RegionTag {
  Region region;
  long window;  // index j of the active window (0 when External)
  double t;     // cutoff argument |sigma| eta^alpha
};

RegionTag classify(Point2 x, const CorrectorParams& p);

// W(x); continuous, eps*pi-periodic and even in x1, equal to -1 on the
// Dirichlet windows and to eps*mu*X exactly in the external region.
double value(Point2 x, const CorrectorParams& p);

// analytic gradient; second component is exactly -mu on the Neumann part of
// the boundary.  Throws singularity_error at the window endpoints.
std::array<double, 2> gradient(Point2 x, const CorrectorParams& p);

// analytic Laplacian: identically zero off the transition ring, where it is
// assembled from the cutoff derivatives and the matched difference W_mat.
double laplacian(Point2 x, const CorrectorParams& p);

struct VerifyReport {
  double max_dirichlet_residual = 0.0;  // max |W + 1| over window samples
  double max_neumann_residual = 0.0;    // max |dW/dx2 + mu| over Neumann samples
  double max_harmonic_residual = 0.0;   // 5-point stencil off the transition ring
  double junction_exponent = 0.0;       // fitted exponent of |W - W(junction)| ~ r^p
  double junction_r2 = 0.0;
  double max_laplacian = 0.0;           // max |Delta W| over transition samples
  double laplacian_envelope_coeff = 0.0;  // max|Delta W| / (mu/eps (1+eta^{4a-2}))
};

VerifyReport verify(const CorrectorParams& p, int samples_per_edge = 64);

}  // namespace stripwave::corrector
