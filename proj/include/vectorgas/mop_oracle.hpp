#pragma once

#include <vector>

#include "vectorgas/model_params.hpp"

namespace vectorgas {

// Result of a truncated lattice-sum evaluation. value underestimates the
// infinite sum by at most truncation_bound (every dropped term is >= 0).
struct OracleEval {
  std::vector<double> x;
  double value = 0;
  double truncation_bound = 0;
};

// log of x^{alpha/2} I_alpha(2 n sqrt(a x)) e^{-n x}; -inf at x = 0 when
// alpha > 0, and 0 there when alpha = 0.
double log_weight(const ModelParams& params, double x);

// Unnormalized joint eigenvalue density at an ordered positive tuple,
// available in closed form for n in {2, 4}:
//   Delta(x) * det[ x^{i-1} w_alpha(x_j) ; x^{i-1} w_{alpha+1}(x_j) ]
// assembled in log scale. Ties give 0 (equal determinant columns);
// decreasing coordinates are an error.
double mop_density(const ModelParams& params, const std::vector<double>& x);

// The same density obtained by summing the two-type gas over its lattice
// species, truncated to the first `terms` lattice points. n in {2, 4}.
// Proportional to mop_density with an n-dependent constant.
OracleEval gas_marginal_density(const ModelParams& params,
                                const std::vector<double>& x, int terms);

}  // namespace vectorgas
