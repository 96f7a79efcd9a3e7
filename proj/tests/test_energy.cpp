#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "test_support.hpp"
#include "vectorgas/energy.hpp"
#include "vectorgas/fields.hpp"

using namespace vectorgas;
using testsup::TinyRng;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

GridMeasure random_grid(TinyRng& rng, double lo, double hi, int cells, double mass) {
  std::vector<double> edges(cells + 1);
  for (int i = 0; i <= cells; ++i) edges[i] = lo + (hi - lo) * i / cells;
  std::vector<double> w(cells);
  double tot = 0;
  for (auto& v : w) tot += (v = rng.uniform(0.05, 1.0));
  for (auto& v : w) v *= mass / tot;
  return GridMeasure(edges, w);
}
}  // namespace

TEST_CASE("empirical self-energy") {
  CHECK(log_energy(EmpiricalMeasure({0.0, 1.0}, 0.5)) == 0.0);
  CHECK(log_energy(EmpiricalMeasure({0.0, 0.5}, 0.5)) ==
        doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
  CHECK(log_energy(EmpiricalMeasure({1.0, 1.0}, 0.5)) == kInf);

  // doubling every weight multiplies the energy by four
  EmpiricalMeasure m({0.2, 0.9, 1.7}, 0.25);
  EmpiricalMeasure m2({0.2, 0.9, 1.7}, 0.5);
  CHECK(log_energy(m2) == doctest::Approx(4.0 * log_energy(m)).epsilon(1e-14));
}

TEST_CASE("grid self-energy: exact single cell") {
  // uniform cell of width d, mass w: energy = w^2 (3/2 - log d)
  CHECK(log_energy(GridMeasure({0.0, 1.0}, {1.0})) ==
        doctest::Approx(1.5).epsilon(1e-15));
  CHECK(log_energy(GridMeasure({0.0, 2.0}, {0.7})) ==
        doctest::Approx(0.49 * (1.5 - std::log(2.0))).epsilon(1e-14));

  // independent check by 2-D midpoint quadrature at width 0.7: the measure
  // has density 1/d, so the energy is the raw integral over d^2. The skipped
  // diagonal strip biases the rule low by O(log(m)/m).
  const double d = 0.7;
  const double quad = testsup::quad2(
                          [](double x, double y) {
                            return x == y ? 0.0 : -std::log(std::abs(x - y));
                          },
                          0.0, d, 0.0, d, 4000) /
                      (d * d);
  CHECK(log_energy(GridMeasure({0.0, d}, {1.0})) ==
        doctest::Approx(quad).epsilon(5e-3));
}

TEST_CASE("grid self-energy: hand-assembled two cells") {
  // midpoints 0.5 and 2, widths 1 and 2
  GridMeasure m({0.0, 1.0, 3.0}, {0.3, 0.7});
  const double expect = 0.09 * 1.5 + 0.49 * (1.5 - std::log(2.0)) +
                        2.0 * 0.3 * 0.7 * (-std::log(1.5));
  CHECK(log_energy(m) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("rescaling the support shifts the energy by log scale times mass squared") {
  TinyRng rng(3);
  GridMeasure m = random_grid(rng, 0.0, 2.0, 9, 1.3);
  std::vector<double> doubled(m.edges());
  for (auto& e : doubled) e *= 2.0;
  GridMeasure m2(doubled, m.weights());
  CHECK(log_energy(m2) ==
        doctest::Approx(log_energy(m) - std::log(2.0) * 1.3 * 1.3).epsilon(1e-12));
}

TEST_CASE("mutual energy") {
  // unit atom at 1 against a half atom at -1: log 1/2 times the mass product
  CHECK(mutual_energy(EmpiricalMeasure({1.0}, 1.0), EmpiricalMeasure({-1.0}, 0.5)) ==
        doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-14));

  TinyRng rng(7);
  GridMeasure g1 = random_grid(rng, 0.5, 2.0, 6, 1.0);
  GridMeasure g2 = random_grid(rng, -3.0, -0.5, 7, 0.5);
  CHECK(mutual_energy(g1, g2) == doctest::Approx(mutual_energy(g2, g1)).epsilon(1e-14));

  // mixed overload agrees with the mass-weighted midpoint pairing for
  // far-apart supports
  EmpiricalMeasure e({-4.0, -2.5}, 0.25);
  double hand = 0;
  for (int i = 0; i < g1.size(); ++i)
    for (int j = 0; j < e.size(); ++j)
      hand += g1.weight(i) * e.atom_mass() * -std::log(std::abs(g1.point(i) - e.atom(j)));
  CHECK(mutual_energy(g1, e) == doctest::Approx(hand).epsilon(1e-12));
}

TEST_CASE("cross kernel resolves cells meeting at the origin") {
  // adjacent unit-mass cells [0, h] and [-h, 0]: the cell average of
  // -log(x - u) is 3/2 - log(4h) exactly (integrate log(s + t))
  const double h = 0.25;
  GridMeasure mu({0.0, h}, {1.0});
  GridMeasure nu({-h, 0.0}, {1.0});
  const double exact = 1.5 - std::log(4.0 * h);
  const double quad = testsup::quad2([](double s, double t) { return -std::log(s + t); },
                                     0.0, h, 0.0, h, 4000) /
                      (h * h);
  CHECK(quad == doctest::Approx(exact).epsilon(1e-3));
  // the low-order product rule resolves the corner singularity to ~0.1%
  CHECK(mutual_energy(mu, nu) == doctest::Approx(exact).epsilon(2e-3));

  // far cells fall back to the midpoint value exactly
  GridMeasure far({-10.0, -9.0}, {1.0});
  CHECK(mutual_energy(mu, far) ==
        doctest::Approx(-std::log(std::abs(mu.point(0) - far.point(0))))
            .epsilon(1e-14));
}

TEST_CASE("kernel matrices match the scalar energies") {
  TinyRng rng(19);
  GridMeasure mu = random_grid(rng, 0.0, 3.0, 8, 1.0);
  GridMeasure nu = random_grid(rng, -2.0, 0.0, 5, 0.5);

  const auto ks = self_kernel_matrix(mu);
  double quad = 0;
  for (int i = 0; i < mu.size(); ++i)
    for (int j = 0; j < mu.size(); ++j)
      quad += mu.weight(i) * mu.weight(j) * ks(i, j);
  CHECK(quad == doctest::Approx(log_energy(mu)).epsilon(1e-13));

  const auto kc = cross_kernel_matrix(mu, nu);
  double cross = 0;
  for (int i = 0; i < mu.size(); ++i)
    for (int j = 0; j < nu.size(); ++j)
      cross += mu.weight(i) * nu.weight(j) * kc(i, j);
  CHECK(cross == doctest::Approx(mutual_energy(mu, nu)).epsilon(1e-13));
}

TEST_CASE("line rate functional composition") {
  TinyRng rng(31);
  GridMeasure mu = random_grid(rng, 1.0, 2.0, 40, 1.0);
  GridMeasure nu = random_grid(rng, -2.0, -1.0, 40, 0.5);
  const double a = 1.0;

  EnergyReport r = rate_line(mu, nu, a);
  CHECK(r.total == doctest::Approx(r.self_mu + r.self_nu - r.cross + r.field_term)
                       .epsilon(1e-13));
  CHECK(r.self_mu == doctest::Approx(log_energy(mu)).epsilon(1e-13));
  CHECK(r.self_nu == doctest::Approx(log_energy(nu)).epsilon(1e-13));
  CHECK(r.cross == doctest::Approx(mutual_energy(mu, nu)).epsilon(1e-13));

  double field = 0;
  for (int i = 0; i < mu.size(); ++i)
    field += mu.weight(i) * (mu.point(i) - 2.0 * std::sqrt(a * mu.point(i)));
  CHECK(r.field_term == doctest::Approx(field).epsilon(1e-13));

  // single-measure reduction drops the second species entirely
  EnergyReport s = rate_line(mu, a);
  CHECK(s.self_nu == 0.0);
  CHECK(s.cross == 0.0);
  CHECK(s.total == doctest::Approx(log_energy(mu) + field).epsilon(1e-13));

  // mass contract is enforced
  CHECK_THROWS_AS(rate_line(nu, mu, a), std::invalid_argument);
  CHECK_THROWS_AS(rate_line(random_grid(rng, -1.0, 1.0, 8, 1.0), nu, a),
                  std::invalid_argument);
}

TEST_CASE("line and sphere evaluations agree") {
  TinyRng rng(41);
  for (int t = 0; t < 10; ++t) {
    const double lo = rng.uniform(0.2, 1.0), hi = lo + rng.uniform(0.5, 3.0);
    const double nlo = -rng.uniform(2.0, 5.0), nhi = -rng.uniform(0.05, 1.0);
    GridMeasure mu = random_grid(rng, lo, hi, 24, 1.0);
    GridMeasure nu = random_grid(rng, nlo, nhi, 24, 0.5);
    const double a = rng.uniform(0.3, 3.0);

    const double line = rate_line(mu, nu, a).total;
    const double sphere = rate_sphere(stereo_push(mu), stereo_push(nu), a).total;
    CHECK(std::abs(line - sphere) <= 1e-6 * std::max(1.0, std::abs(line)));
  }
}

TEST_CASE("sphere rate handles the point at infinity and collisions") {
  SphereMeasure nu_s = stereo_push(GridMeasure::uniform(-2.0, -1.0, 8, 0.5));

  SphereMeasure mu_inf({stereo_angle(1.0)}, {0.5}, 0.5);
  CHECK(rate_sphere(mu_inf, nu_s, 1.0).total == kInf);

  SphereMeasure mu_rep = stereo_push(EmpiricalMeasure({1.0, 1.0}, 0.5));
  CHECK(rate_sphere(mu_rep, nu_s, 1.0).total == kInf);
}

TEST_CASE("rate functional is convex along weight segments") {
  TinyRng rng(53);
  GridMeasure mu0 = random_grid(rng, 0.0, 6.0, 30, 1.0);
  GridMeasure nu0 = random_grid(rng, -4.0, 0.0, 30, 0.5);
  for (int t = 0; t < 10; ++t) {
    GridMeasure mu1 = random_grid(rng, 0.0, 6.0, 30, 1.0).with_weights(
        random_grid(rng, 0.0, 6.0, 30, 1.0).weights());
    GridMeasure nu1 = random_grid(rng, -4.0, 0.0, 30, 0.5);

    auto mix = [](const GridMeasure& p, const GridMeasure& q, double t) {
      std::vector<double> w(p.weights());
      for (size_t i = 0; i < w.size(); ++i)
        w[i] = (1 - t) * w[i] + t * q.weight(i);
      return p.with_weights(w);
    };
    const double j0 = rate_line(mu0, nu0, 1.0).total;
    const double j1 = rate_line(mu1, nu1, 1.0).total;
    const double jm =
        rate_line(mix(mu0, mu1, 0.5), mix(nu0, nu1, 0.5), 1.0).total;
    CHECK(jm <= 0.5 * (j0 + j1) + 1e-10);
  }
}

TEST_CASE("interaction quadratic form is nonnegative on signed perturbations") {
  // second difference of the rate along any weight direction is >= 0
  TinyRng rng(67);
  GridMeasure mu = random_grid(rng, 0.0, 5.0, 20, 1.0);
  GridMeasure nu = random_grid(rng, -3.0, 0.0, 20, 0.5);
  for (int t = 0; t < 8; ++t) {
    std::vector<double> dmu(20), dnu(20);
    double smu = 0, snu = 0;
    for (auto& v : dmu) smu += (v = rng.uniform(-1.0, 1.0));
    for (auto& v : dnu) snu += (v = rng.uniform(-1.0, 1.0));
    for (auto& v : dmu) v -= smu / 20;  // zero total mass
    for (auto& v : dnu) v -= snu / 20;

    const double eps = 1e-3;
    auto shifted = [&](double s) {
      std::vector<double> wm(mu.weights()), wn(nu.weights());
      bool ok = true;
      for (int i = 0; i < 20; ++i) {
        wm[i] += s * eps * dmu[i];
        wn[i] += s * eps * dnu[i];
        ok = ok && wm[i] >= 0 && wn[i] >= 0;
      }
      if (!ok) return std::numeric_limits<double>::quiet_NaN();
      return rate_line(mu.with_weights(wm), nu.with_weights(wn), 1.0).total;
    };
    const double fp = shifted(1.0), fm = shifted(-1.0), f0 = shifted(0.0);
    if (std::isnan(fp) || std::isnan(fm)) continue;
    CHECK(fp + fm - 2 * f0 >= -1e-10);
  }
}
