#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "vectorgas/model_params.hpp"

namespace vectorgas {

// Piecewise-uniform measure over contiguous cells. Support points are cell
// midpoints; mass equals the weight sum by construction.
class GridMeasure {
public:
  GridMeasure(std::vector<double> edges, std::vector<double> weights);

  static GridMeasure uniform(double lo, double hi, int cells, double mass);

  int size() const { return static_cast<int>(weights_.size()); }
  double point(int i) const { return 0.5 * (edges_[i] + edges_[i + 1]); }
  double width(int i) const { return edges_[i + 1] - edges_[i]; }
  double weight(int i) const { return weights_[i]; }
  double left_edge(int i) const { return edges_[i]; }
  double right_edge(int i) const { return edges_[i + 1]; }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& weights() const { return weights_; }
  double mass() const { return mass_; }

  // Smallest x with cdf(x) >= level; level in (0, mass].
  double quantile(double level) const;

  GridMeasure with_weights(std::vector<double> weights) const;

private:
  std::vector<double> edges_;
  std::vector<double> weights_;
  double mass_;
};

// Finite collection of equally weighted atoms.
class EmpiricalMeasure {
public:
  EmpiricalMeasure(std::vector<double> atoms, double atom_mass);

  int size() const { return static_cast<int>(atoms_.size()); }
  double atom(int i) const { return atoms_[i]; }
  const std::vector<double>& atoms() const { return atoms_; }
  double atom_mass() const { return atom_mass_; }
  double mass() const { return atom_mass_ * size(); }

private:
  std::vector<double> atoms_;
  double atom_mass_;
};

// Finite section of the constraint lattice a_k = -(j_{alpha,k} / (2 sqrt(a) n))^2,
// strictly decreasing in k.
class Lattice {
public:
  Lattice(ModelParams params, int count);

  const ModelParams& params() const { return params_; }
  int size() const { return static_cast<int>(values_.size()); }
  double value(int k) const { return values_[k]; }
  const std::vector<double>& values() const { return values_; }

  // sigma_n([b, 0]) = #{k : a_k >= b} / n; requires the table to cover b.
  double counting_mass(double b) const;

private:
  ModelParams params_;
  std::vector<double> values_;
};

Lattice lattice_points(const ModelParams& params, int count);

// Limiting constraint measure on R-: density (sqrt(a)/pi) |x|^{-1/2}.
class ConstraintMeasure {
public:
  explicit ConstraintMeasure(double a);

  double a() const { return a_; }
  double density(double x) const;                 // +inf at x == 0
  double interval_mass(double lo, double hi) const;  // [lo, hi] subset of R-

private:
  double a_;
};

double sigma_density(double a, double x);

// Measure on the circle S of center (0, 1/2), radius 1/2, parameterized by
// the angle phi = 2 atan(x) of the inverse stereographic map; phi = pi is
// the point at infinity (0, 1). Pushed grid measures keep their preimage
// cell edges so energy evaluation can integrate over cells.
class SphereMeasure {
public:
  SphereMeasure(std::vector<double> angles, std::vector<double> weights,
                double mass_at_infinity = 0.0,
                std::vector<double> edge_angles = {});

  int size() const { return static_cast<int>(angles_.size()); }
  double angle(int i) const { return angles_[i]; }
  double weight(int i) const { return weights_[i]; }
  const std::vector<double>& angles() const { return angles_; }
  const std::vector<double>& weights() const { return weights_; }
  double mass() const { return mass_; }
  double mass_at_infinity() const { return mass_at_infinity_; }
  bool has_cells() const { return !edge_angles_.empty(); }
  const std::vector<double>& edge_angles() const { return edge_angles_; }

  // 2-D coordinates of support point i; lies on S to machine precision.
  std::pair<double, double> xy(int i) const;

private:
  std::vector<double> angles_;
  std::vector<double> weights_;
  std::vector<double> edge_angles_;
  double mass_;
  double mass_at_infinity_;
};

// Euclidean distance between circle points at the given angles.
double sphere_chord(double phi1, double phi2);

// T(x) = (x, x^2)/(1+x^2) as an angle: phi = 2 atan(x).
double stereo_angle(double x);
double stereo_pullback(double phi);

SphereMeasure stereo_push(const GridMeasure& m);
SphereMeasure stereo_push(const EmpiricalMeasure& m);

// Bounded-Lipschitz distance between sphere measures of equal total mass,
// computed on a fixed uniform angular discretization (512 bins) via the
// exact transport dual of the binned problem.
double bl_distance(const SphereMeasure& m1, const SphereMeasure& m2);

// Atoms x_1 < ... < x_n with m([x_{i-1}, x_i]) = mass/n (successive minima).
std::vector<double> quantile_discretize(const GridMeasure& m, int n);

struct SnapResult {
  std::vector<double> values;  // snapped positions, input order
  std::vector<int> indices;    // lattice indices of the snapped positions
  bool interlacing = false;    // y_i < u_{i+1} < y_{i+1} for all i
  bool distinct = false;
};

// u_i = max{u in lattice : u < y_i}; throws if some y_i lies below the table.
SnapResult snap_to_lattice(const std::vector<double>& atoms, const Lattice& lat);

// Default lattice size covering [-4(1+a), 0] with margin, at least 8n.
int default_lattice_count(const ModelParams& params);

}  // namespace vectorgas
