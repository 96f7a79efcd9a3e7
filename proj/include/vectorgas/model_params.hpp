#pragma once

#include <stdexcept>

namespace vectorgas {

// Ensemble parameters: perturbation strength a > 0, Bessel order alpha >= 0,
// particle count n >= 1. Routes that pair n particles with n/2 lattice
// particles require n even; call sites enforce that.
struct ModelParams {
  double a = 1.0;
  double alpha = 0.0;
  int n = 2;

  void validate() const {
    if (!(a > 0)) throw std::domain_error("ModelParams: a must be > 0");
    if (!(alpha >= 0)) throw std::domain_error("ModelParams: alpha must be >= 0");
    if (n < 1) throw std::domain_error("ModelParams: n must be >= 1");
  }

  void validate_even() const {
    validate();
    if (n % 2 != 0) throw std::domain_error("ModelParams: n must be even here");
  }
};

}  // namespace vectorgas
