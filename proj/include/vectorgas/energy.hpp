#pragma once

#include <Eigen/Dense>

#include "vectorgas/measures.hpp"

namespace vectorgas {

// Components of the rate functional. total = self_mu - cross + self_nu +
// field_term whenever every component is finite; an infinite self energy
// makes the total +inf regardless of the cross term.
struct EnergyReport {
  double self_mu = 0;
  double self_nu = 0;
  double cross = 0;
  double field_term = 0;
  double total = 0;
};

// Logarithmic self-energy int int log 1/|x-y| dm dm. Grid measures use
// midpoint interactions between distinct cells plus the exact per-cell
// term w^2 (3/2 - log width) for a uniform cell; empirical measures use the
// pairwise sum over distinct atoms (coincident atoms give +inf).
double log_energy(const GridMeasure& m);
double log_energy(const EmpiricalMeasure& m);

// Cross energy int int log 1/|x-u| dm1 dm2 (sign included, may be negative).
double mutual_energy(const GridMeasure& m1, const GridMeasure& m2);
double mutual_energy(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2);
double mutual_energy(const GridMeasure& m1, const EmpiricalMeasure& m2);

// Interaction matrices shared with the equilibrium solver so the discrete
// objective and the energy reports use identical conventions.
// Self kernel: K_ii = 3/2 - log width_i, K_ij = -log|p_i - p_j|.
Eigen::MatrixXd self_kernel_matrix(const GridMeasure& m);
// Cross kernel: cell-pair averages; pairs whose edge gap is at most the sum
// of the two widths are integrated with a 4x4 Gauss-Legendre rule (this is
// what resolves the cells meeting at the origin), midpoints elsewhere.
Eigen::MatrixXd cross_kernel_matrix(const GridMeasure& m1, const GridMeasure& m2);

// Rate functional on the line: mu on R+ with mass 1, nu on R- with mass 1/2
// (or mass 0 for the single-measure reduction); field term int (x - 2
// sqrt(a x)) dmu by the midpoint rule.
EnergyReport rate_line(const GridMeasure& mu, const GridMeasure& nu, double a);
EnergyReport rate_line(const GridMeasure& mu, double a);

// Same functional evaluated on the sphere: chord-distance kernels and the
// compactified field; +inf if mu carries mass at the point at infinity.
EnergyReport rate_sphere(const SphereMeasure& mu_s, const SphereMeasure& nu_s,
                         double a);

}  // namespace vectorgas
