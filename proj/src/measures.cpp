#include "vectorgas/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vectorgas/special_functions.hpp"

namespace vectorgas {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

GridMeasure::GridMeasure(std::vector<double> edges, std::vector<double> weights)
    : edges_(std::move(edges)), weights_(std::move(weights)) {
  if (edges_.size() < 2 || weights_.size() + 1 != edges_.size())
    throw std::invalid_argument("GridMeasure: need n+1 edges for n weights");
  for (size_t i = 0; i + 1 < edges_.size(); ++i)
    if (!(edges_[i] < edges_[i + 1]))
      throw std::invalid_argument("GridMeasure: edges must be strictly increasing");
  mass_ = 0;
  for (double w : weights_) {
    if (!(w >= 0)) throw std::invalid_argument("GridMeasure: negative weight");
    mass_ += w;
  }
}

GridMeasure GridMeasure::uniform(double lo, double hi, int cells, double mass) {
  if (cells < 1) throw std::invalid_argument("GridMeasure: cells must be >= 1");
  std::vector<double> edges(cells + 1);
  for (int i = 0; i <= cells; ++i)
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / cells;
  std::vector<double> w(cells, mass / cells);
  return GridMeasure(std::move(edges), std::move(w));
}

double GridMeasure::quantile(double level) const {
  if (!(level > 0) || level > mass_ * (1 + 1e-12))
    throw std::domain_error("GridMeasure::quantile: level outside (0, mass]");
  level = std::min(level, mass_);
  double cum = 0;
  int last_positive = -1;
  for (int i = 0; i < size(); ++i) {
    if (weights_[i] <= 0) continue;
    if (cum + weights_[i] >= level) {
      double frac = (level - cum) / weights_[i];
      return edges_[i] + frac * width(i);
    }
    cum += weights_[i];
    last_positive = i;
  }
  return edges_[last_positive + 1];  // roundoff fell past the last cell
}

GridMeasure GridMeasure::with_weights(std::vector<double> weights) const {
  return GridMeasure(edges_, std::move(weights));
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> atoms, double atom_mass)
    : atoms_(std::move(atoms)), atom_mass_(atom_mass) {
  if (atoms_.empty()) throw std::invalid_argument("EmpiricalMeasure: no atoms");
  if (!(atom_mass_ > 0))
    throw std::invalid_argument("EmpiricalMeasure: atom mass must be > 0");
}

Lattice::Lattice(ModelParams params, int count) : params_(params) {
  params_.validate();
  if (count < 1) throw std::invalid_argument("Lattice: count must be >= 1");
  auto zt = zero_table(params_.alpha, count);
  values_.resize(static_cast<size_t>(count));
  const double scale = 2.0 * std::sqrt(params_.a) * params_.n;
  for (int k = 0; k < count; ++k) {
    double r = (*zt)[k] / scale;
    values_[k] = -(r * r);
  }
}

double Lattice::counting_mass(double b) const {
  if (!(b <= 0)) throw std::domain_error("Lattice: b must be <= 0");
  if (values_.back() > b)
    throw std::domain_error("Lattice: table does not cover the interval");
  // values_ strictly decreasing; count entries >= b.
  auto it = std::lower_bound(values_.begin(), values_.end(), b,
                             [](double v, double bb) { return v >= bb; });
  return static_cast<double>(it - values_.begin()) / params_.n;
}

Lattice lattice_points(const ModelParams& params, int count) {
  return Lattice(params, count);
}

ConstraintMeasure::ConstraintMeasure(double a) : a_(a) {
  if (!(a > 0)) throw std::domain_error("ConstraintMeasure: a must be > 0");
}

double ConstraintMeasure::density(double x) const {
  if (x == 0) throw std::domain_error("sigma density is singular at x = 0");
  if (x > 0) return 0.0;
  return std::sqrt(a_) / (kPi * std::sqrt(-x));
}

double ConstraintMeasure::interval_mass(double lo, double hi) const {
  if (!(lo <= hi) || hi > 0)
    throw std::domain_error("ConstraintMeasure: need lo <= hi <= 0");
  return (2.0 * std::sqrt(a_) / kPi) * (std::sqrt(-lo) - std::sqrt(-hi));
}

double sigma_density(double a, double x) {
  return ConstraintMeasure(a).density(x);
}

SphereMeasure::SphereMeasure(std::vector<double> angles,
                             std::vector<double> weights,
                             double mass_at_infinity,
                             std::vector<double> edge_angles)
    : angles_(std::move(angles)),
      weights_(std::move(weights)),
      edge_angles_(std::move(edge_angles)),
      mass_at_infinity_(mass_at_infinity) {
  if (angles_.size() != weights_.size())
    throw std::invalid_argument("SphereMeasure: angles/weights length mismatch");
  if (!edge_angles_.empty() && edge_angles_.size() != angles_.size() + 1)
    throw std::invalid_argument("SphereMeasure: need n+1 edge angles");
  if (!(mass_at_infinity_ >= 0))
    throw std::invalid_argument("SphereMeasure: negative mass at infinity");
  mass_ = mass_at_infinity_;
  for (size_t i = 0; i < angles_.size(); ++i) {
    if (!(angles_[i] > -kPi && angles_[i] <= kPi))
      throw std::invalid_argument("SphereMeasure: angle outside (-pi, pi]");
    if (!(weights_[i] >= 0))
      throw std::invalid_argument("SphereMeasure: negative weight");
    mass_ += weights_[i];
  }
}

std::pair<double, double> SphereMeasure::xy(int i) const {
  double phi = angles_[i];
  return {0.5 * std::sin(phi), 0.5 - 0.5 * std::cos(phi)};
}

double sphere_chord(double phi1, double phi2) {
  return std::abs(std::sin(0.5 * (phi1 - phi2)));
}

double stereo_angle(double x) { return 2.0 * std::atan(x); }

double stereo_pullback(double phi) { return std::tan(0.5 * phi); }

SphereMeasure stereo_push(const GridMeasure& m) {
  std::vector<double> angles(m.size()), edge_angles(m.size() + 1);
  for (int i = 0; i < m.size(); ++i) angles[i] = stereo_angle(m.point(i));
  for (int i = 0; i <= m.size(); ++i)
    edge_angles[i] = stereo_angle(m.edges()[i]);
  return SphereMeasure(std::move(angles), m.weights(), 0.0,
                       std::move(edge_angles));
}

SphereMeasure stereo_push(const EmpiricalMeasure& m) {
  std::vector<double> angles(m.size());
  for (int i = 0; i < m.size(); ++i) angles[i] = stereo_angle(m.atom(i));
  std::sort(angles.begin(), angles.end());
  return SphereMeasure(std::move(angles),
                       std::vector<double>(m.size(), m.atom_mass()));
}

namespace {

constexpr int kBlBins = 512;

std::vector<double> bin_on_sphere(const SphereMeasure& m) {
  std::vector<double> bins(kBlBins, 0.0);
  auto put = [&](double phi, double w) {
    double t = (phi + kPi) / (2.0 * kPi);
    int idx = std::min(kBlBins - 1, std::max(0, static_cast<int>(t * kBlBins)));
    bins[idx] += w;
  };
  for (int i = 0; i < m.size(); ++i) put(m.angle(i), m.weight(i));
  if (m.mass_at_infinity() > 0) put(kPi, m.mass_at_infinity());
  return bins;
}

// Exact minimum-cost transport between small supply/demand vectors via
// successive shortest paths with potentials (costs must be >= 0).
double min_cost_transport(const std::vector<double>& supply,
                          const std::vector<double>& demand,
                          const std::vector<double>& spos,
                          const std::vector<double>& dpos) {
  const int p = static_cast<int>(supply.size());
  const int q = static_cast<int>(demand.size());
  if (p == 0 || q == 0) return 0.0;
  auto cost = [&](int i, int j) { return sphere_chord(spos[i], dpos[j]); };

  std::vector<double> rs = supply, rd = demand;
  std::vector<double> pu(p, 0.0), pv(q, 0.0);
  std::vector<std::vector<double>> flow(p, std::vector<double>(q, 0.0));
  double total = 0;
  for (double v : supply) total += v;
  double remaining = total;
  const double eps = 1e-14 * std::max(1.0, total);

  int guard = 50 * (p + q) + 100;
  while (remaining > eps && guard-- > 0) {
    // Dijkstra over sources [0,p) and sinks [p,p+q) with reduced costs.
    const int v = p + q;
    std::vector<double> dist(v, kInf);
    std::vector<int> parent(v, -1);
    std::vector<char> done(v, 0);
    for (int i = 0; i < p; ++i)
      if (rs[i] > eps) dist[i] = 0;
    int best_sink = -1;
    for (int round = 0; round < v; ++round) {
      int u = -1;
      double du = kInf;
      for (int n = 0; n < v; ++n)
        if (!done[n] && dist[n] < du) {
          du = dist[n];
          u = n;
        }
      if (u < 0) break;
      done[u] = 1;
      if (u >= p && rd[u - p] > eps) {
        best_sink = u - p;
        break;
      }
      if (u < p) {
        for (int j = 0; j < q; ++j) {
          double w = cost(u, j) + pu[u] - pv[j];
          if (w < 0) w = 0;  // tight arcs may round slightly negative
          if (dist[u] + w < dist[p + j]) {
            dist[p + j] = dist[u] + w;
            parent[p + j] = u;
          }
        }
      } else {
        int j = u - p;
        for (int i = 0; i < p; ++i) {
          if (flow[i][j] <= 0) continue;
          double w = pv[j] - pu[i] - cost(i, j);
          if (w < 0) w = 0;
          if (dist[u] + w < dist[i]) {
            dist[i] = dist[u] + w;
            parent[i] = u;
          }
        }
      }
    }
    if (best_sink < 0) break;  // nothing reachable (should not happen)

    // Bottleneck along the augmenting path.
    double bottleneck = rd[best_sink];
    for (int n = p + best_sink; parent[n] >= 0; n = parent[n]) {
      int pn = parent[n];
      if (n >= p) {
        if (pn >= p) throw std::logic_error("transport: bad path");
      } else {
        bottleneck = std::min(bottleneck, flow[n][pn - p]);
      }
      if (parent[pn] < 0) bottleneck = std::min(bottleneck, rs[pn]);
    }
    // Apply flow changes.
    for (int n = p + best_sink; parent[n] >= 0; n = parent[n]) {
      int pn = parent[n];
      if (n >= p)
        flow[pn][n - p] += bottleneck;
      else
        flow[n][pn - p] -= bottleneck;
    }
    int src = p + best_sink;
    while (parent[src] >= 0) src = parent[src];
    rs[src] -= bottleneck;
    rd[best_sink] -= bottleneck;
    remaining -= bottleneck;

    // Potential update keeps reduced costs nonnegative.
    double dcap = dist[p + best_sink];
    for (int i = 0; i < p; ++i) pu[i] += std::min(dist[i], dcap);
    for (int j = 0; j < q; ++j) pv[j] += std::min(dist[p + j], dcap);
  }

  double c = 0;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < q; ++j)
      if (flow[i][j] > 0) c += flow[i][j] * cost(i, j);
  return c;
}

}  // namespace

double bl_distance(const SphereMeasure& m1, const SphereMeasure& m2) {
  double scale = std::max({1.0, m1.mass(), m2.mass()});
  if (std::abs(m1.mass() - m2.mass()) > 1e-9 * scale)
    throw std::domain_error("bl_distance: measures must have equal mass");
  auto b1 = bin_on_sphere(m1);
  auto b2 = bin_on_sphere(m2);
  std::vector<double> supply, demand, spos, dpos;
  for (int i = 0; i < kBlBins; ++i) {
    double center = -kPi + (i + 0.5) * 2.0 * kPi / kBlBins;
    double d = b1[i] - b2[i];
    if (d > 1e-15) {
      supply.push_back(d);
      spos.push_back(center);
    } else if (d < -1e-15) {
      demand.push_back(-d);
      dpos.push_back(center);
    }
  }
  // Totals can differ by accumulated rounding; trim the heavier side.
  double ts = 0, td = 0;
  for (double v : supply) ts += v;
  for (double v : demand) td += v;
  if (!supply.empty() && ts > td) supply[0] -= ts - td;
  if (!demand.empty() && td > ts) demand[0] -= td - ts;
  return min_cost_transport(supply, demand, spos, dpos);
}

std::vector<double> quantile_discretize(const GridMeasure& m, int n) {
  if (n < 1) throw std::domain_error("quantile_discretize: n must be >= 1");
  if (!(m.mass() > 0)) throw std::domain_error("quantile_discretize: zero mass");
  std::vector<double> atoms(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i)
    atoms[i - 1] = m.quantile(m.mass() * static_cast<double>(i) / n);
  return atoms;
}

SnapResult snap_to_lattice(const std::vector<double>& atoms, const Lattice& lat) {
  SnapResult res;
  res.values.reserve(atoms.size());
  res.indices.reserve(atoms.size());
  for (size_t i = 0; i + 1 < atoms.size(); ++i)
    if (!(atoms[i] < atoms[i + 1]))
      throw std::invalid_argument("snap_to_lattice: atoms must be increasing");
  const auto& vals = lat.values();
  for (double y : atoms) {
    if (!(y < 0)) throw std::domain_error("snap_to_lattice: atoms must be < 0");
    // First index whose value is strictly below y (values decrease with k).
    auto it = std::lower_bound(vals.begin(), vals.end(), y,
                               [](double v, double yy) { return v >= yy; });
    if (it == vals.end())
      throw std::domain_error(
          "snap_to_lattice: atom below the lattice table (truncation)");
    res.indices.push_back(static_cast<int>(it - vals.begin()));
    res.values.push_back(*it);
  }
  res.distinct = true;
  for (size_t i = 0; i + 1 < res.indices.size(); ++i)
    if (res.indices[i] == res.indices[i + 1]) res.distinct = false;
  // Interlacing y_i < u_{i+1} < y_{i+1} with atoms ascending.
  res.interlacing = true;
  for (size_t i = 0; i + 1 < atoms.size(); ++i)
    if (!(atoms[i] < res.values[i + 1] && res.values[i + 1] < atoms[i + 1]))
      res.interlacing = false;
  return res;
}

int default_lattice_count(const ModelParams& params) {
  params.validate();
  double reach = 4.0 * (1.0 + params.a);
  int cover = static_cast<int>(
      std::ceil(2.0 * params.n * std::sqrt(params.a * reach) / kPi));
  return std::max(8 * params.n, cover + 64);
}

}  // namespace vectorgas
