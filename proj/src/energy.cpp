#include "vectorgas/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vectorgas/fields.hpp"

namespace vectorgas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;
constexpr double kMassTol = 1e-6;

// 4-point Gauss-Legendre rule on [-1, 1].
constexpr double kGlNode[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
constexpr double kGlWeight[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};

// Mean of -log|x - u| over a cell pair. Used where the midpoint value would
// see the singularity of the kernel, e.g. for the two cells that meet at
// the origin; the tensor nodes are interior, so adjacent cells stay finite.
double gl_pair_mean(double lo1, double hi1, double lo2, double hi2) {
  const double c1 = 0.5 * (lo1 + hi1), h1 = 0.5 * (hi1 - lo1);
  const double c2 = 0.5 * (lo2 + hi2), h2 = 0.5 * (hi2 - lo2);
  double sum = 0;
  for (int g = 0; g < 4; ++g) {
    const double x = c1 + h1 * kGlNode[g];
    double inner = 0;
    for (int h = 0; h < 4; ++h)
      inner -= kGlWeight[h] * std::log(std::abs(x - (c2 + h2 * kGlNode[h])));
    sum += kGlWeight[g] * inner;
  }
  return 0.25 * sum;
}

// A pair is refined when the gap between the cells is at most the sum of
// the widths; separated pairs keep the cheap midpoint value.
bool cells_near(double lo1, double hi1, double lo2, double hi2) {
  const double gap = std::max({lo2 - hi1, lo1 - hi2, 0.0});
  return gap <= (hi1 - lo1) + (hi2 - lo2);
}

double cross_cell_value(const GridMeasure& m1, int i, const GridMeasure& m2,
                        int j) {
  const double lo1 = m1.left_edge(i), hi1 = m1.right_edge(i);
  const double lo2 = m2.left_edge(j), hi2 = m2.right_edge(j);
  if (cells_near(lo1, hi1, lo2, hi2)) return gl_pair_mean(lo1, hi1, lo2, hi2);
  return -std::log(std::abs(m1.point(i) - m2.point(j)));
}

// Half the log of the conformal stretch of the stereographic map at x.
double ell(double x) { return 0.5 * std::log1p(x * x); }

double weighted_ell(const GridMeasure& m) {
  double s = 0;
  for (int i = 0; i < m.size(); ++i) s += m.weight(i) * ell(m.point(i));
  return s;
}

GridMeasure pullback_grid(const SphereMeasure& s) {
  std::vector<double> edges(s.edge_angles().size());
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = stereo_pullback(s.edge_angles()[i]);
  return GridMeasure(std::move(edges), s.weights());
}

// Pairwise self-energy of an atomic sphere measure under the chord kernel.
// A point mass at infinity joins the pair sum as an atom at angle pi.
double atomic_sphere_self(const SphereMeasure& s) {
  std::vector<double> phi = s.angles();
  std::vector<double> w = s.weights();
  if (s.mass_at_infinity() > 0) {
    phi.push_back(kPi);
    w.push_back(s.mass_at_infinity());
  }
  double sum = 0;
  for (std::size_t i = 0; i < phi.size(); ++i)
    for (std::size_t j = i + 1; j < phi.size(); ++j) {
      const double d = sphere_chord(phi[i], phi[j]);
      if (d == 0) return kInf;
      sum -= 2.0 * w[i] * w[j] * std::log(d);
    }
  return sum;
}

double atomic_sphere_cross(const std::vector<double>& phi1,
                           const std::vector<double>& w1,
                           const std::vector<double>& phi2,
                           const std::vector<double>& w2) {
  double sum = 0;
  for (std::size_t i = 0; i < phi1.size(); ++i)
    for (std::size_t j = 0; j < phi2.size(); ++j) {
      const double d = sphere_chord(phi1[i], phi2[j]);
      if (d == 0) return kInf;
      sum -= w1[i] * w2[j] * std::log(d);
    }
  return sum;
}

void append_side_points(const SphereMeasure& s, std::vector<double>* phi,
                        std::vector<double>* w) {
  *phi = s.angles();
  *w = s.weights();
  if (s.mass_at_infinity() > 0) {
    phi->push_back(kPi);
    w->push_back(s.mass_at_infinity());
  }
}

void assemble_total(EnergyReport* r) {
  // Any singular component (infinite self-energy, diverging field, atoms of
  // the two measures colliding) marks the configuration as rate +inf.
  if (!std::isfinite(r->self_mu) || !std::isfinite(r->self_nu) ||
      !std::isfinite(r->cross) || !std::isfinite(r->field_term)) {
    r->total = kInf;
    return;
  }
  r->total = r->self_mu + r->self_nu - r->cross + r->field_term;
}

void check_mass(double have, double want, const char* who) {
  if (std::abs(have - want) > kMassTol)
    throw std::invalid_argument(std::string(who) + ": unexpected total mass");
}

}  // namespace

double log_energy(const GridMeasure& m) {
  double sum = 0;
  for (int i = 0; i < m.size(); ++i) {
    const double wi = m.weight(i);
    sum += wi * wi * (1.5 - std::log(m.width(i)));
    for (int j = i + 1; j < m.size(); ++j)
      sum -= 2.0 * wi * m.weight(j) * std::log(std::abs(m.point(i) - m.point(j)));
  }
  return sum;
}

double log_energy(const EmpiricalMeasure& m) {
  double sum = 0;
  for (int i = 0; i < m.size(); ++i)
    for (int j = i + 1; j < m.size(); ++j) {
      const double d = std::abs(m.atom(i) - m.atom(j));
      if (d == 0) return kInf;
      sum -= std::log(d);
    }
  return 2.0 * m.atom_mass() * m.atom_mass() * sum;
}

double mutual_energy(const GridMeasure& m1, const GridMeasure& m2) {
  double sum = 0;
  for (int i = 0; i < m1.size(); ++i)
    for (int j = 0; j < m2.size(); ++j)
      sum += m1.weight(i) * m2.weight(j) * cross_cell_value(m1, i, m2, j);
  return sum;
}

double mutual_energy(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2) {
  double sum = 0;
  for (int i = 0; i < m1.size(); ++i)
    for (int j = 0; j < m2.size(); ++j) {
      const double d = std::abs(m1.atom(i) - m2.atom(j));
      if (d == 0) return kInf;
      sum -= std::log(d);
    }
  return m1.atom_mass() * m2.atom_mass() * sum;
}

double mutual_energy(const GridMeasure& m1, const EmpiricalMeasure& m2) {
  double sum = 0;
  for (int i = 0; i < m1.size(); ++i)
    for (int j = 0; j < m2.size(); ++j) {
      const double d = std::abs(m1.point(i) - m2.atom(j));
      if (d == 0) return kInf;
      sum -= m1.weight(i) * std::log(d);
    }
  return m2.atom_mass() * sum;
}

Eigen::MatrixXd self_kernel_matrix(const GridMeasure& m) {
  const int n = m.size();
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i) {
    k(i, i) = 1.5 - std::log(m.width(i));
    for (int j = i + 1; j < n; ++j) {
      const double v = -std::log(std::abs(m.point(i) - m.point(j)));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Eigen::MatrixXd cross_kernel_matrix(const GridMeasure& m1,
                                    const GridMeasure& m2) {
  Eigen::MatrixXd k(m1.size(), m2.size());
  for (int i = 0; i < m1.size(); ++i)
    for (int j = 0; j < m2.size(); ++j) k(i, j) = cross_cell_value(m1, i, m2, j);
  return k;
}

EnergyReport rate_line(const GridMeasure& mu, const GridMeasure& nu, double a) {
  check_mass(mu.mass(), 1.0, "rate_line mu");
  check_mass(nu.mass(), 0.5, "rate_line nu");
  if (mu.left_edge(0) < -1e-12)
    throw std::invalid_argument("rate_line: mu must be supported on [0, inf)");
  if (nu.right_edge(nu.size() - 1) > 1e-12)
    throw std::invalid_argument("rate_line: nu must be supported on (-inf, 0]");
  EnergyReport r;
  r.self_mu = log_energy(mu);
  r.self_nu = log_energy(nu);
  r.cross = mutual_energy(mu, nu);
  for (int i = 0; i < mu.size(); ++i)
    r.field_term += mu.weight(i) * q_field(a, std::max(0.0, mu.point(i)));
  assemble_total(&r);
  return r;
}

EnergyReport rate_line(const GridMeasure& mu, double a) {
  check_mass(mu.mass(), 1.0, "rate_line mu");
  if (mu.left_edge(0) < -1e-12)
    throw std::invalid_argument("rate_line: mu must be supported on [0, inf)");
  EnergyReport r;
  r.self_mu = log_energy(mu);
  for (int i = 0; i < mu.size(); ++i)
    r.field_term += mu.weight(i) * q_field(a, std::max(0.0, mu.point(i)));
  assemble_total(&r);
  return r;
}

EnergyReport rate_sphere(const SphereMeasure& mu_s, const SphereMeasure& nu_s,
                         double a) {
  // mass() already counts the infinity component
  check_mass(mu_s.mass(), 1.0, "rate_sphere mu");
  check_mass(nu_s.mass(), 0.5, "rate_sphere nu");
  for (double phi : mu_s.angles())
    if (phi < -1e-12)
      throw std::invalid_argument("rate_sphere: mu must sit on the image of [0, inf)");
  for (double phi : nu_s.angles())
    if (phi > 1e-12)
      throw std::invalid_argument("rate_sphere: nu must sit on the image of (-inf, 0]");

  EnergyReport r;
  if (mu_s.mass_at_infinity() > 0) {
    // The compactified field diverges at the infinity point.
    r.field_term = kInf;
    r.total = kInf;
    return r;
  }

  std::optional<GridMeasure> mu_line, nu_line;
  if (mu_s.has_cells()) mu_line.emplace(pullback_grid(mu_s));
  if (nu_s.has_cells()) nu_line.emplace(pullback_grid(nu_s));

  // Chord and line kernels differ by the conformal factor, which is smooth,
  // so cell measures evaluate it at midpoints and keep the line quadrature
  // for the log singularity itself.
  double l_mu = 0, l_nu = 0;
  if (mu_line) {
    l_mu = weighted_ell(*mu_line);
    r.self_mu = log_energy(*mu_line) + 2.0 * mu_line->mass() * l_mu;
  } else {
    r.self_mu = atomic_sphere_self(mu_s);
  }
  if (nu_line) {
    if (nu_s.mass_at_infinity() > 0) {
      // A point mass has infinite logarithmic self-energy.
      r.self_nu = kInf;
    } else {
      l_nu = weighted_ell(*nu_line);
      r.self_nu = log_energy(*nu_line) + 2.0 * nu_line->mass() * l_nu;
    }
  } else {
    r.self_nu = atomic_sphere_self(nu_s);
  }

  if (mu_line && nu_line && nu_s.mass_at_infinity() == 0) {
    r.cross = mutual_energy(*mu_line, *nu_line) + nu_line->mass() * l_mu +
              mu_line->mass() * l_nu;
  } else {
    std::vector<double> phi1, w1, phi2, w2;
    append_side_points(mu_s, &phi1, &w1);
    append_side_points(nu_s, &phi2, &w2);
    r.cross = atomic_sphere_cross(phi1, w1, phi2, w2);
  }

  if (mu_line) {
    for (int i = 0; i < mu_line->size(); ++i)
      r.field_term +=
          mu_line->weight(i) * script_v(a, std::max(0.0, mu_line->point(i)));
  } else {
    for (int i = 0; i < mu_s.size(); ++i)
      r.field_term += mu_s.weight(i) * script_v_angle(a, mu_s.angle(i));
  }

  assemble_total(&r);
  return r;
}

}  // namespace vectorgas
