#pragma once

#include <stdexcept>
#include <string>

namespace stripwave {

// Point in the fast variables: either xi = x/eps or sigma = xi/eta,
// stated per function. c2 >= 0 (upper half plane / half strip).
struct Point2 {
  double c1 = 0.0;
  double c2 = 0.0;
};

// Truncation control for all series evaluations.
struct SeriesTruncation {
  double tol = 1e-12;
  long n_max = 1'000'000;
};

// Value of a truncated series together with the rigorous tail bound that
// was achieved and the number of summed terms.
struct SeriesValue {
  double value = 0.0;
  double err_bound = 0.0;
  long terms = 0;
};

struct truncation_error : std::runtime_error {
  truncation_error(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_bound(achieved) {}
  double achieved_bound;
};

struct singularity_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace stripwave
