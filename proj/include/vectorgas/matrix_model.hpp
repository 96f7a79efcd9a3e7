#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vectorgas/measures.hpp"
#include "vectorgas/model_params.hpp"
#include "vectorgas/rng.hpp"

namespace vectorgas {

// Draws X = A + G with A the (n + alpha) x n matrix whose top square block
// is sqrt(a) I, and G filled with independent complex Gaussians of total
// variance 1/n per entry. Requires integer alpha.
Eigen::MatrixXcd sample_matrix(const ModelParams& params, Prng* rng);

// Eigenvalues of X^* X for one draw, ascending, clamped to [0, inf).
std::vector<double> sample_spectrum(const ModelParams& params, Prng* rng);

// Normalized counting measure of a spectrum: each of the n eigenvalues
// carries mass 1/n.
EmpiricalMeasure spectral_measure(std::vector<double> eigenvalues, int n);

}  // namespace vectorgas
