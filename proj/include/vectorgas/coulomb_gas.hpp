#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "vectorgas/measures.hpp"
#include "vectorgas/model_params.hpp"
#include "vectorgas/rng.hpp"

namespace vectorgas {

// State of the two-type gas: n continuous particles on R+ and n/2 particles
// sitting on distinct lattice points, stored as indices into the table.
struct ParticleConfig {
  ModelParams params;
  std::shared_ptr<const Lattice> lattice;
  std::vector<double> x;
  std::vector<int> u;
  int snap_shifts = 0;  // collisions resolved while building the config
};

struct ChainStats {
  std::int64_t steps = 0;  // completed sweeps
  std::int64_t proposed_x = 0;
  std::int64_t accepted_x = 0;
  std::int64_t proposed_u = 0;
  std::int64_t accepted_u = 0;
  double proposal_width = 0;
  std::uint64_t seed = 0;
  std::int64_t top_decile_visits = 0;  // u accepted into the top 10% of the table
  double max_drift = 0;  // worst incremental-vs-recomputed density gap
};

struct RunOptions {
  std::int64_t steps = 20000;  // post-burnin sweeps
  std::int64_t burnin = 4000;
  std::int64_t thin = 10;
  int window = 16;              // u-proposal window, in lattice indices
  double global_prob = 0.05;    // chance of a table-wide u-proposal
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
};

struct GasSample {
  std::int64_t step = 0;
  std::vector<double> x;
  std::vector<double> u_values;
};

struct GasRun {
  std::vector<GasSample> samples;
  ChainStats stats;
  ParticleConfig last;
};

// Unnormalized log density of the gas:
//   2 sum_{i<j} log|x_i-x_j| + 2 sum_{i<j} log|u_i-u_j|
//   - sum_{i,j} log(x_i-u_j) - n sum_i v_n(x_i) + sum_i log|u_i|,
// -inf on coincident particles of either type or x outside the support.
double gas_log_density(const ParticleConfig& c);

// Density change when particle moves, computed in O(n); matches
// gas_log_density(after) - gas_log_density(before) (possibly -inf).
double delta_log_density_x(const ParticleConfig& c, int i, double x_new);
double delta_log_density_u(const ParticleConfig& c, int j, int index_new);

// Probability that the mixture proposal (windowed / table-wide, both
// uniform over unoccupied indices) proposes index_new for particle j.
double u_proposal_prob(const ParticleConfig& c, int j, int index_new,
                       const RunOptions& opt);

// Quantile atoms for x, downward lattice snapping for u; snap collisions
// move to the next free index below (recorded in snap_shifts).
ParticleConfig init_config(const GridMeasure& mu, const GridMeasure& nu,
                           const ModelParams& params,
                           std::shared_ptr<const Lattice> lattice = nullptr);

// Metropolis-within-Gibbs chain. One sweep proposes a move for every
// particle of both types. The Gaussian x-width adapts toward acceptance
// 0.35 during burnin and is frozen afterwards.
class GasSampler {
 public:
  GasSampler(ParticleConfig init, const RunOptions& opt);

  void sweep();
  bool step_x(int i);
  bool step_u(int j);

  void set_adapting(bool on) { adapting_ = on; }
  const ParticleConfig& config() const { return cfg_; }
  const ChainStats& stats() const { return stats_; }
  double current_log_density() const { return current_; }
  double proposal_width() const { return width_; }

 private:
  void adapt_width();
  void drift_check();

  ParticleConfig cfg_;
  RunOptions opt_;
  Prng rng_;
  std::vector<char> occupied_;
  double current_ = 0;
  double width_ = 0;
  bool adapting_ = true;
  std::int64_t moves_since_check_ = 0;
  std::int64_t batch_proposed_ = 0;
  std::int64_t batch_accepted_ = 0;
  int adapt_rounds_ = 0;
  ChainStats stats_;
};

// Runs burnin + steps sweeps, emitting every opt.thin-th post-burnin state.
GasRun mcmc_run(const ParticleConfig& init, const RunOptions& opt);

}  // namespace vectorgas
