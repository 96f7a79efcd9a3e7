#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <vector>

#include "test_support.hpp"
#include "vectorgas/coulomb_gas.hpp"
#include "vectorgas/fields.hpp"
#include "vectorgas/mop_oracle.hpp"

using namespace vectorgas;
using testsup::TinyRng;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

ParticleConfig make_config(const ModelParams& p, std::vector<double> x,
                           std::vector<int> u, int table = 256) {
  ParticleConfig c;
  c.params = p;
  c.lattice = std::make_shared<Lattice>(lattice_points(p, table));
  c.x = std::move(x);
  c.u = std::move(u);
  return c;
}

// direct assembly of the log density from its definition
double reference_log_density(const ParticleConfig& c) {
  const auto& lat = *c.lattice;
  const int n = static_cast<int>(c.x.size());
  const int m = static_cast<int>(c.u.size());
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      s += 2.0 * std::log(std::abs(c.x[i] - c.x[j]));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      s += 2.0 * std::log(std::abs(lat.value(c.u[i]) - lat.value(c.u[j])));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) s -= std::log(c.x[i] - lat.value(c.u[j]));
  for (int i = 0; i < n; ++i) s -= c.params.n * v_n(c.params, c.x[i]);
  for (int j = 0; j < m; ++j) s += std::log(std::abs(lat.value(c.u[j])));
  return s;
}
}  // namespace

TEST_CASE("log density assembles its five terms") {
  ModelParams p{1.0, 0.0, 4};
  ParticleConfig c = make_config(p, {0.3, 0.9, 1.7, 2.4}, {0, 3});
  CHECK(gas_log_density(c) == doctest::Approx(reference_log_density(c)).epsilon(1e-13));

  ModelParams p1{2.0, 1.0, 6};
  ParticleConfig c1 = make_config(p1, {0.2, 0.5, 0.9, 1.4, 2.2, 3.3}, {1, 4, 7});
  CHECK(gas_log_density(c1) == doctest::Approx(reference_log_density(c1)).epsilon(1e-13));
}

TEST_CASE("log density degenerates to -inf") {
  ModelParams p{1.0, 0.0, 4};
  CHECK(gas_log_density(make_config(p, {0.3, 0.9, 0.9, 2.4}, {0, 3})) == -kInf);
  CHECK(gas_log_density(make_config(p, {0.3, 0.9, 1.7, 2.4}, {3, 3})) == -kInf);
  CHECK(gas_log_density(make_config(p, {-0.3, 0.9, 1.7, 2.4}, {0, 3})) == -kInf);
}

TEST_CASE("incremental density changes match full recomputation") {
  ModelParams p{1.0, 0.0, 6};
  ParticleConfig c = make_config(p, {0.2, 0.6, 1.0, 1.5, 2.1, 3.0}, {0, 2, 5});
  TinyRng rng(17);

  for (int t = 0; t < 60; ++t) {
    const int i = rng.below(6);
    const double xn = rng.uniform(0.01, 4.0);
    const double delta = delta_log_density_x(c, i, xn);
    ParticleConfig after = c;
    after.x[i] = xn;
    const double full = gas_log_density(after) - gas_log_density(c);
    CHECK(delta == doctest::Approx(full).epsilon(1e-9));
    if (t % 3 == 0) c = after;  // walk the state around
  }

  for (int t = 0; t < 60; ++t) {
    const int j = rng.below(3);
    const int kn = rng.below(40);
    bool occ = false;
    for (int q = 0; q < 3; ++q) occ = occ || c.u[q] == kn;
    const double delta = delta_log_density_u(c, j, kn);
    if (occ && kn != c.u[j]) {
      CHECK(delta == -kInf);
      continue;
    }
    ParticleConfig after = c;
    after.u[j] = kn;
    const double full = gas_log_density(after) - gas_log_density(c);
    if (kn == c.u[j]) {
      CHECK(delta == doctest::Approx(0.0).epsilon(1e-12));
    } else {
      CHECK(delta == doctest::Approx(full).epsilon(1e-9));
      c = after;
    }
  }
}

TEST_CASE("mixture proposal probabilities form a distribution") {
  ModelParams p{1.0, 0.0, 6};
  ParticleConfig c = make_config(p, {0.2, 0.6, 1.0, 1.5, 2.1, 3.0}, {0, 2, 5}, 40);
  RunOptions opt;
  opt.window = 4;
  opt.global_prob = 0.1;

  for (int j = 0; j < 3; ++j) {
    double total = 0;
    for (int k = 0; k < 40; ++k) total += u_proposal_prob(c, j, k, opt);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u_proposal_prob(c, j, c.u[j], opt) == 0.0);
    // occupied targets are never proposed
    for (int q = 0; q < 3; ++q)
      if (c.u[q] != c.u[j]) CHECK(u_proposal_prob(c, j, c.u[q], opt) == 0.0);
  }

  // a far target is reachable only through the global component
  const double far = u_proposal_prob(c, 0, 30, opt);
  CHECK(far > 0.0);
  CHECK(far == doctest::Approx(0.1 / (40 - 3)).epsilon(1e-12));
}

TEST_CASE("proposal and density changes satisfy pairwise balance") {
  // for any u move k -> k': pi(s) q(s -> s') a(s -> s') equals
  // pi(s') q(s' -> s) a(s' -> s) with a = min(1, e^delta q_back / q_fwd)
  ModelParams p{1.0, 0.0, 4};
  ParticleConfig c = make_config(p, {0.3, 0.8, 1.6, 2.7}, {1, 3}, 24);
  RunOptions opt;
  opt.window = 3;
  opt.global_prob = 0.2;

  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 24; ++k) {
      const double qf = u_proposal_prob(c, j, k, opt);
      if (qf == 0.0) continue;
      ParticleConfig cp = c;
      cp.u[j] = k;
      const double qb = u_proposal_prob(cp, j, c.u[j], opt);
      REQUIRE(qb > 0.0);
      const double delta = delta_log_density_u(c, j, k);
      const double af = std::min(1.0, std::exp(delta) * qb / qf);
      const double ab = std::min(1.0, std::exp(-delta) * qf / qb);
      const double flow_f = std::exp(gas_log_density(c)) * qf * af;
      const double flow_b = std::exp(gas_log_density(cp)) * qb * ab;
      CHECK(flow_f == doctest::Approx(flow_b).epsilon(1e-10));
    }
  }
}

TEST_CASE("initial configuration from measures") {
  ModelParams p{1.0, 0.0, 40};
  GridMeasure mu = GridMeasure::uniform(0.05, 7.0, 64, 1.0);
  GridMeasure nu = GridMeasure::uniform(-8.0, -0.05, 64, 0.5);

  ParticleConfig c = init_config(mu, nu, p);
  REQUIRE(static_cast<int>(c.x.size()) == 40);
  REQUIRE(static_cast<int>(c.u.size()) == 20);
  for (int i = 0; i < 40; ++i) {
    CHECK(c.x[i] > 0);
    if (i > 0) CHECK(c.x[i] > c.x[i - 1]);
  }
  std::set<int> uniq(c.u.begin(), c.u.end());
  CHECK(uniq.size() == c.u.size());
  CHECK(std::isfinite(gas_log_density(c)));

  // a shared lattice handle is reused, not copied
  auto lat = std::make_shared<Lattice>(lattice_points(p, default_lattice_count(p)));
  ParticleConfig c2 = init_config(mu, nu, p, lat);
  CHECK(c2.lattice.get() == lat.get());
}

TEST_CASE("snap collisions are resolved downward") {
  // squeeze all of nu into a band narrower than the local lattice spacing:
  // every atom wants the same site and the collisions cascade down
  ModelParams p{1.0, 0.0, 8};
  GridMeasure mu = GridMeasure::uniform(0.05, 4.0, 32, 1.0);
  GridMeasure nu = GridMeasure::uniform(-2.0000002, -2.0, 16, 0.5);

  ParticleConfig c = init_config(mu, nu, p);
  CHECK(c.snap_shifts > 0);
  std::set<int> uniq(c.u.begin(), c.u.end());
  CHECK(uniq.size() == c.u.size());
  CHECK(std::isfinite(gas_log_density(c)));
}

TEST_CASE("chain run: invariants, adaptation, drift") {
  ModelParams p{1.0, 0.0, 8};
  GridMeasure mu = GridMeasure::uniform(0.05, 6.0, 64, 1.0);
  GridMeasure nu = GridMeasure::uniform(-6.0, -0.05, 64, 0.5);
  ParticleConfig init = init_config(mu, nu, p);

  RunOptions opt;
  opt.steps = 4000;
  opt.burnin = 1500;
  opt.thin = 10;
  opt.seed = 99;

  GasRun run = mcmc_run(init, opt);
  CHECK(static_cast<int>(run.samples.size()) == 400);
  CHECK(run.stats.steps == opt.steps + opt.burnin);
  CHECK(run.stats.max_drift <= 1e-9);
  CHECK(run.stats.proposal_width > 1e-4);
  CHECK(run.stats.proposal_width < 10.0);

  const double acc_x =
      static_cast<double>(run.stats.accepted_x) / run.stats.proposed_x;
  CHECK(acc_x > 0.15);
  CHECK(acc_x < 0.6);
  const double acc_u =
      static_cast<double>(run.stats.accepted_u) / run.stats.proposed_u;
  CHECK(acc_u > 0.02);
  CHECK(acc_u < 0.95);

  for (const auto& s : run.samples) {
    REQUIRE(static_cast<int>(s.x.size()) == 8);
    for (double v : s.x) CHECK(v > 0);
    std::set<double> uniq(s.u_values.begin(), s.u_values.end());
    CHECK(uniq.size() == s.u_values.size());  // at most one particle per site
  }

  // identical options reproduce the identical run
  GasRun run2 = mcmc_run(init, opt);
  CHECK(run2.samples.back().x == run.samples.back().x);
  CHECK(run2.stats.accepted_x == run.stats.accepted_x);

  // a different stream decorrelates
  RunOptions opt2 = opt;
  opt2.stream = 7;
  GasRun run3 = mcmc_run(init, opt2);
  CHECK(run3.samples.back().x != run.samples.back().x);
}

TEST_CASE("two-particle chain matches the closed-form marginal") {
  // pooled coordinate distribution against the n = 2 determinant density,
  // normalized by quadrature
  ModelParams p{1.0, 0.0, 2};
  GridMeasure mu = GridMeasure::uniform(0.05, 5.0, 64, 1.0);
  GridMeasure nu = GridMeasure::uniform(-5.0, -0.05, 64, 0.5);
  ParticleConfig init = init_config(mu, nu, p);

  RunOptions opt;
  opt.steps = 20000;
  opt.burnin = 4000;
  opt.thin = 1;
  opt.seed = 314;

  GasRun run = mcmc_run(init, opt);

  std::vector<double> pool;
  pool.reserve(2 * run.samples.size());
  for (const auto& s : run.samples) {
    pool.push_back(s.x[0]);
    pool.push_back(s.x[1]);
  }
  std::sort(pool.begin(), pool.end());

  // oracle cdf of the pooled coordinate by 2-D midpoint quadrature over the
  // ordered sector
  const int g = 400;
  const double hi = 12.0, h = hi / g;
  std::vector<double> colmass(g, 0.0);
  double total = 0;
  for (int i = 0; i < g; ++i) {
    const double x1 = (i + 0.5) * h;
    for (int j = i; j < g; ++j) {
      const double x2 = (j + 0.5) * h;
      const double v = mop_density(p, {x1, x2});
      colmass[i] += 0.5 * v;
      colmass[j] += 0.5 * v;
      total += v;
    }
  }
  std::vector<double> cdf(g);
  double acc = 0;
  for (int i = 0; i < g; ++i) {
    acc += colmass[i] / total;
    cdf[i] = acc;
  }

  double ks = 0;
  for (size_t s = 0; s < pool.size(); ++s) {
    const int cell = std::min(g - 1, static_cast<int>(pool[s] / h));
    const double f = cdf[cell];
    ks = std::max(ks, std::abs(f - (s + 1.0) / pool.size()));
  }
  CHECK(ks <= 0.05);
}
