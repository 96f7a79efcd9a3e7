#include "vectorgas/coulomb_gas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vectorgas/fields.hpp"

namespace vectorgas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_structure(const ParticleConfig& c) {
  c.params.validate_even();
  if (!c.lattice) throw std::invalid_argument("ParticleConfig: missing lattice");
  if (static_cast<int>(c.x.size()) != c.params.n)
    throw std::invalid_argument("ParticleConfig: expected n x-particles");
  if (static_cast<int>(c.u.size()) != c.params.n / 2)
    throw std::invalid_argument("ParticleConfig: expected n/2 u-particles");
  for (int k : c.u)
    if (k < 0 || k >= c.lattice->size())
      throw std::invalid_argument("ParticleConfig: lattice index out of range");
}

void check_options(const RunOptions& opt) {
  if (opt.steps < 0 || opt.burnin < 0)
    throw std::invalid_argument("RunOptions: negative step counts");
  if (opt.thin < 1) throw std::invalid_argument("RunOptions: thin must be >= 1");
  if (opt.window < 1) throw std::invalid_argument("RunOptions: window must be >= 1");
  if (!(opt.global_prob >= 0 && opt.global_prob < 1))
    throw std::invalid_argument("RunOptions: global_prob must lie in [0, 1)");
}

bool x_in_support(double x, double alpha) {
  if (x < 0) return false;
  return x > 0 || alpha == 0;
}

// Mixture proposal density for a u-move from index cur, given the occupancy
// table: uniform over free indices within the window, with a global_prob
// chance of uniform over all free indices. The free count is the same in
// every reachable state, which makes the global part symmetric.
double proposal_prob(const std::vector<char>& occ, int cur, int target,
                     int half, const RunOptions& opt) {
  const int size = static_cast<int>(occ.size());
  if (target < 0 || target >= size || occ[target]) return 0;
  const int lo = std::max(0, cur - opt.window);
  const int hi = std::min(size - 1, cur + opt.window);
  int in_window = 0;
  bool target_in_window = false;
  for (int k = lo; k <= hi; ++k)
    if (!occ[k]) {
      ++in_window;
      if (k == target) target_in_window = true;
    }
  double p = 0;
  if (target_in_window) p += (1.0 - opt.global_prob) / in_window;
  p += opt.global_prob / (size - half);
  return p;
}

std::vector<char> occupancy(const ParticleConfig& c) {
  std::vector<char> occ(c.lattice->size(), 0);
  for (int k : c.u) occ[k] = 1;
  return occ;
}

}  // namespace

double gas_log_density(const ParticleConfig& c) {
  check_structure(c);
  const int n = c.params.n;
  const int half = n / 2;

  for (double xi : c.x)
    if (!x_in_support(xi, c.params.alpha)) return -kInf;
  {
    std::vector<int> sorted = c.u;
    std::sort(sorted.begin(), sorted.end());
    for (int j = 1; j < half; ++j)
      if (sorted[j] == sorted[j - 1]) return -kInf;
  }

  std::vector<double> uv(half);
  for (int j = 0; j < half; ++j) uv[j] = c.lattice->value(c.u[j]);

  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = std::abs(c.x[i] - c.x[j]);
      if (d == 0) return -kInf;
      s += 2.0 * std::log(d);
    }
  for (int i = 0; i < half; ++i)
    for (int j = i + 1; j < half; ++j)
      s += 2.0 * std::log(std::abs(uv[i] - uv[j]));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < half; ++j) s -= std::log(c.x[i] - uv[j]);
  for (int i = 0; i < n; ++i) s -= n * v_n(c.params, c.x[i]);
  for (int j = 0; j < half; ++j) s += std::log(-uv[j]);
  return s;
}

double delta_log_density_x(const ParticleConfig& c, int i, double x_new) {
  check_structure(c);
  if (i < 0 || i >= c.params.n)
    throw std::invalid_argument("delta_log_density_x: bad particle index");
  if (!x_in_support(x_new, c.params.alpha)) return -kInf;
  const double x_old = c.x[i];
  if (x_new == x_old) return 0;

  double d = 0;
  for (int j = 0; j < c.params.n; ++j) {
    if (j == i) continue;
    const double dn = std::abs(x_new - c.x[j]);
    if (dn == 0) return -kInf;
    d += 2.0 * (std::log(dn) - std::log(std::abs(x_old - c.x[j])));
  }
  for (int k : c.u) {
    const double uv = c.lattice->value(k);
    d -= std::log(x_new - uv) - std::log(x_old - uv);
  }
  d -= c.params.n * (v_n(c.params, x_new) - v_n(c.params, x_old));
  return d;
}

double delta_log_density_u(const ParticleConfig& c, int j, int index_new) {
  check_structure(c);
  const int half = c.params.n / 2;
  if (j < 0 || j >= half)
    throw std::invalid_argument("delta_log_density_u: bad particle index");
  if (index_new < 0 || index_new >= c.lattice->size())
    throw std::invalid_argument("delta_log_density_u: lattice index out of range");
  if (index_new == c.u[j]) return 0;
  for (int l = 0; l < half; ++l)
    if (l != j && c.u[l] == index_new) return -kInf;

  const double u_old = c.lattice->value(c.u[j]);
  const double u_new = c.lattice->value(index_new);
  double d = 0;
  for (int l = 0; l < half; ++l) {
    if (l == j) continue;
    const double uv = c.lattice->value(c.u[l]);
    d += 2.0 * (std::log(std::abs(u_new - uv)) - std::log(std::abs(u_old - uv)));
  }
  for (double xi : c.x) d -= std::log(xi - u_new) - std::log(xi - u_old);
  d += std::log(-u_new) - std::log(-u_old);
  return d;
}

double u_proposal_prob(const ParticleConfig& c, int j, int index_new,
                       const RunOptions& opt) {
  check_structure(c);
  check_options(opt);
  if (j < 0 || j >= c.params.n / 2)
    throw std::invalid_argument("u_proposal_prob: bad particle index");
  return proposal_prob(occupancy(c), c.u[j], index_new, c.params.n / 2, opt);
}

ParticleConfig init_config(const GridMeasure& mu, const GridMeasure& nu,
                           const ModelParams& params,
                           std::shared_ptr<const Lattice> lattice) {
  params.validate_even();
  ParticleConfig c;
  c.params = params;
  if (lattice) {
    const ModelParams& lp = lattice->params();
    if (lp.a != params.a || lp.alpha != params.alpha || lp.n != params.n)
      throw std::invalid_argument("init_config: lattice built for other params");
    c.lattice = std::move(lattice);
  } else {
    c.lattice =
        std::make_shared<Lattice>(params, default_lattice_count(params));
  }

  c.x = quantile_discretize(mu, params.n);
  for (double v : c.x)
    if (!(v > 0))
      throw std::invalid_argument("init_config: mu quantiles must be positive");

  const int half = params.n / 2;
  const SnapResult snap =
      snap_to_lattice(quantile_discretize(nu, half), *c.lattice);
  const int size = c.lattice->size();
  std::vector<char> occ(size, 0);
  c.u.assign(half, -1);
  // Largest atom claims its site first; a collision walks down the table
  // (more negative values), which keeps every site below its atom.
  for (int i = half - 1; i >= 0; --i) {
    int k = snap.indices[i];
    while (k < size && occ[k]) ++k;
    if (k >= size)
      throw std::runtime_error("init_config: lattice table exhausted");
    if (k != snap.indices[i]) ++c.snap_shifts;
    occ[k] = 1;
    c.u[i] = k;
  }

  if (gas_log_density(c) == -kInf)
    throw std::invalid_argument("init_config: built a zero-density config");
  return c;
}

GasSampler::GasSampler(ParticleConfig init, const RunOptions& opt)
    : cfg_(std::move(init)), opt_(opt), rng_(opt.seed, opt.stream) {
  check_options(opt_);
  check_structure(cfg_);
  occupied_ = occupancy(cfg_);
  current_ = gas_log_density(cfg_);
  if (current_ == -kInf)
    throw std::invalid_argument("GasSampler: initial config has zero density");
  width_ = (1.0 + cfg_.params.a) / cfg_.params.n;
  stats_.seed = opt_.seed;
  stats_.proposal_width = width_;
}

bool GasSampler::step_x(int i) {
  ++stats_.proposed_x;
  ++batch_proposed_;
  ++moves_since_check_;
  const double proposal = cfg_.x[i] + width_ * rng_.normal();
  bool accepted = false;
  if (x_in_support(proposal, cfg_.params.alpha)) {
    const double d = delta_log_density_x(cfg_, i, proposal);
    if (d >= 0 || rng_.uniform() < std::exp(d)) {
      cfg_.x[i] = proposal;
      current_ += d;
      ++stats_.accepted_x;
      ++batch_accepted_;
      accepted = true;
    }
  }
  drift_check();
  return accepted;
}

bool GasSampler::step_u(int j) {
  ++stats_.proposed_u;
  ++moves_since_check_;
  const int size = static_cast<int>(occupied_.size());
  const int half = cfg_.params.n / 2;
  const int cur = cfg_.u[j];

  int cand = -1;
  if (rng_.uniform() < opt_.global_prob) {
    do {
      cand = static_cast<int>(rng_.below(size));
    } while (occupied_[cand]);
  } else {
    const int lo = std::max(0, cur - opt_.window);
    const int hi = std::min(size - 1, cur + opt_.window);
    int count = 0;
    for (int k = lo; k <= hi; ++k) count += !occupied_[k];
    if (count == 0) {
      drift_check();
      return false;
    }
    int pick = static_cast<int>(rng_.below(count));
    for (int k = lo; k <= hi; ++k)
      if (!occupied_[k] && pick-- == 0) {
        cand = k;
        break;
      }
  }

  const double d = delta_log_density_u(cfg_, j, cand);
  const double q_fwd = proposal_prob(occupied_, cur, cand, half, opt_);
  occupied_[cur] = 0;
  occupied_[cand] = 1;
  const double q_back = proposal_prob(occupied_, cand, cur, half, opt_);
  const double ratio = std::exp(std::min(d, 700.0)) * (q_back / q_fwd);
  bool accepted = false;
  if (ratio >= 1 || rng_.uniform() < ratio) {
    cfg_.u[j] = cand;
    current_ += d;
    ++stats_.accepted_u;
    if (cand >= size - (size + 9) / 10) ++stats_.top_decile_visits;
    accepted = true;
  } else {
    occupied_[cand] = 0;
    occupied_[cur] = 1;
  }
  drift_check();
  return accepted;
}

void GasSampler::sweep() {
  for (int i = 0; i < cfg_.params.n; ++i) step_x(i);
  for (int j = 0; j < cfg_.params.n / 2; ++j) step_u(j);
  ++stats_.steps;
  if (adapting_ && batch_proposed_ >= 200) adapt_width();
}

void GasSampler::adapt_width() {
  const double rate =
      static_cast<double>(batch_accepted_) / static_cast<double>(batch_proposed_);
  ++adapt_rounds_;
  const double gain = 0.5 / std::sqrt(static_cast<double>(adapt_rounds_));
  width_ *= std::exp(gain * (rate - 0.35));
  width_ = std::clamp(width_, 1e-8, 1e3);
  batch_proposed_ = 0;
  batch_accepted_ = 0;
  stats_.proposal_width = width_;
}

void GasSampler::drift_check() {
  if (moves_since_check_ < 10000) return;
  moves_since_check_ = 0;
  const double full = gas_log_density(cfg_);
  const double drift = std::abs(full - current_);
  stats_.max_drift = std::max(stats_.max_drift, drift);
  if (drift > 1e-9 * std::max(1.0, std::abs(full)))
    throw std::runtime_error("GasSampler: incremental density drifted");
  current_ = full;
}

GasRun mcmc_run(const ParticleConfig& init, const RunOptions& opt) {
  GasSampler sampler(init, opt);
  for (std::int64_t t = 0; t < opt.burnin; ++t) sampler.sweep();
  sampler.set_adapting(false);

  GasRun run;
  const int half = init.params.n / 2;
  for (std::int64_t t = 1; t <= opt.steps; ++t) {
    sampler.sweep();
    if (t % opt.thin == 0) {
      GasSample s;
      s.step = t;
      s.x = sampler.config().x;
      s.u_values.resize(half);
      for (int j = 0; j < half; ++j)
        s.u_values[j] = sampler.config().lattice->value(sampler.config().u[j]);
      run.samples.push_back(std::move(s));
    }
  }
  run.stats = sampler.stats();
  run.last = sampler.config();
  return run;
}

}  // namespace vectorgas
