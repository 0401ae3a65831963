#pragma once

#include <span>
#include <vector>

#include "stripwave/common.hpp"

namespace stripwave::fitting {

struct RateFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
};

// least squares of ln(y) against ln(x); requires >= 3 positive samples
RateFit fit_rate(std::span<const double> xs, std::span<const double> ys);
RateFit fit_rate(const std::vector<double>& xs, const std::vector<double>& ys);

struct Extrapolation {
  double value = 0.0;       // extrapolated limit
  double rate = 0.0;        // fitted reduction exponent (per refinement step)
  double step_error = 0.0;  // |value - finest sample|
  bool reliable = false;    // Aitken applicable (monotone, contracting)
};

// Aitken/Richardson extrapolation of a sequence computed on nested meshes
// refined by a fixed factor (default 2); the exponent is fitted, not assumed.
Extrapolation richardson(std::span<const double> values, double refinement = 2.0);

}  // namespace stripwave::fitting
