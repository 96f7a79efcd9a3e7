#include "vectorgas/matrix_model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace vectorgas {

Eigen::MatrixXcd sample_matrix(const ModelParams& params, Prng* rng) {
  params.validate();
  const double rounded = std::round(params.alpha);
  if (rounded != params.alpha || rounded < 0)
    throw std::invalid_argument(
        "sample_matrix: alpha must be a nonnegative integer");
  const int n = params.n;
  const int m = n + static_cast<int>(rounded);
  const double scale = 1.0 / std::sqrt(2.0 * n);
  Eigen::MatrixXcd x(m, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < m; ++r)
      x(r, c) = std::complex<double>(scale * rng->normal(), scale * rng->normal());
  const double root_a = std::sqrt(params.a);
  for (int i = 0; i < n; ++i) x(i, i) += root_a;
  return x;
}

std::vector<double> sample_spectrum(const ModelParams& params, Prng* rng) {
  const Eigen::MatrixXcd x = sample_matrix(params, rng);
  const Eigen::MatrixXcd w = x.adjoint() * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(w, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("sample_spectrum: eigensolver failed");
  std::vector<double> out(params.n);
  for (int i = 0; i < params.n; ++i)
    out[i] = std::max(0.0, solver.eigenvalues()[i]);
  return out;
}

EmpiricalMeasure spectral_measure(std::vector<double> eigenvalues, int n) {
  if (n <= 0) throw std::invalid_argument("spectral_measure: n must be > 0");
  std::sort(eigenvalues.begin(), eigenvalues.end());
  return EmpiricalMeasure(std::move(eigenvalues), 1.0 / n);
}

}  // namespace vectorgas
