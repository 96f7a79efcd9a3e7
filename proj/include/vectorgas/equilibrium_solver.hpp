#pragma once

#include <utility>
#include <vector>

#include "vectorgas/fields.hpp"
#include "vectorgas/measures.hpp"

namespace vectorgas {

// Discretized minimization of
//   E(mu) + E(nu) - E(mu, nu) + int (V - 2 sqrt(a x)) dmu
// over mu >= 0 on [0, R] with mass 1 and 0 <= nu <= sigma-caps on [-S, 0]
// with mass nu_mass. Grids fix the cells; weights are the unknowns.
class EquilibriumProblem {
 public:
  EquilibriumProblem(double a, FieldSpec field, GridMeasure mu_grid,
                     GridMeasure nu_grid, double nu_mass);

  // [0, R] uniform for mu; [-S, 0] geometrically refined toward 0 for nu
  // (the constraint density diverges there). R = 4 (1 + sqrt(a))^2,
  // S = 16 max(1, a) unless given.
  static EquilibriumProblem standard(double a, int mu_cells, int nu_cells);
  static EquilibriumProblem standard(double a, int mu_cells, int nu_cells,
                                     double r, double s);
  // Decoupled sanity mode: nu pinned to zero mass, single-measure problem.
  static EquilibriumProblem single(double a, int mu_cells, double r);

  double a() const { return a_; }
  const FieldSpec& field() const { return field_; }
  const GridMeasure& mu_grid() const { return mu_grid_; }
  const GridMeasure& nu_grid() const { return nu_grid_; }
  const std::vector<double>& caps() const { return caps_; }
  double nu_mass() const { return nu_mass_; }
  // Effective field Q = V - 2 sqrt(a x) at the mu midpoints.
  std::vector<double> field_values() const;

 private:
  double a_;
  FieldSpec field_;
  GridMeasure mu_grid_;
  GridMeasure nu_grid_;
  std::vector<double> caps_;
  double nu_mass_;
};

struct EquilibriumSolution {
  GridMeasure mu_star;
  GridMeasure nu_star;
  double objective = 0;
  double el_mu_residual = 0;
  double el_nu_residual = 0;
  int iterations = 0;
  bool converged = false;
};

struct SolveOptions {
  double tol = 1e-7;   // sup-norm threshold for the projected gradient
  int max_iter = 200000;
  int start = 0;       // 0: uniform / cap-proportional, 1: skewed probe
  bool polish = true;  // finish with an active-set equality solve
};

// 1/2 w^T G w + f^T w for stacked weights; throws on infeasible input.
double objective(const EquilibriumProblem& prob, const std::vector<double>& mu_w,
                 const std::vector<double>& nu_w);

// Projected gradient descent with Armijo backtracking, step seeded at
// 1/lambda_max(G); optional active-set polish once the sets settle.
EquilibriumSolution solve(const EquilibriumProblem& prob,
                          const SolveOptions& opt = {});

// First-order optimality report: sup deviation of the effective potentials
// phi_mu = 2 U^mu - U^nu + Q and phi_nu = 2 U^nu - U^mu from their
// support constants, with the one-sided slack pattern off support / at caps.
std::pair<double, double> el_residuals(const EquilibriumProblem& prob,
                                       const GridMeasure& mu_star,
                                       const GridMeasure& nu_star);

// Re-solves with doubled R (at most 4 doublings) while the outermost 5% of
// [0, R] holds more than 1e-4 of mu mass.
EquilibriumSolution solve_with_domain_growth(double a, int mu_cells,
                                             int nu_cells,
                                             const SolveOptions& opt = {});

// Euclidean projections used by the solver, exposed for direct checks.
std::vector<double> project_simplex(std::vector<double> v, double mass);
std::vector<double> project_capped_simplex(std::vector<double> v,
                                           const std::vector<double>& caps,
                                           double mass);

}  // namespace vectorgas
