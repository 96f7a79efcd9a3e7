#include "vectorgas/mop_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vectorgas/fields.hpp"
#include "vectorgas/measures.hpp"
#include "vectorgas/special_functions.hpp"

namespace vectorgas {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_tuple(const ModelParams& params, const std::vector<double>& x) {
  if (params.n != 2 && params.n != 4)
    throw std::invalid_argument("oracle densities need n = 2 or n = 4");
  if (static_cast<int>(x.size()) != params.n)
    throw std::invalid_argument("tuple size must equal n");
  if (!(x[0] > 0))
    throw std::invalid_argument("coordinates must be positive");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (x[i] < x[i - 1])
      throw std::invalid_argument("coordinates must be ordered");
}

// Sum of 1/|a_k| over every lattice point beyond the last tabulated one.
// Consecutive Bessel zeros are at least 0.99 pi apart for all alpha >= 0,
// so the remainder is dominated by an arithmetic progression and closes
// via trigamma.
double lattice_tail_inv(const ModelParams& params, double last_value) {
  const double scale = 2.0 * std::sqrt(params.a) * params.n;
  const double j_last = scale * std::sqrt(-last_value);
  const double gap = 0.99 * kPi;
  return scale * scale / (gap * gap) * trigamma(j_last / gap + 1.0);
}

}  // namespace

double log_weight(const ModelParams& params, double x) {
  return -params.n * v_n(params, x);
}

double mop_density(const ModelParams& params, const std::vector<double>& x) {
  check_tuple(params, x);
  ModelParams up = params;
  up.alpha += 1.0;

  if (params.n == 2) {
    const double l1 = log_weight(params, x[0]) + log_weight(up, x[1]);
    const double l2 = log_weight(params, x[1]) + log_weight(up, x[0]);
    // (x2 - x1)(e^{l1} - e^{l2}), difference taken against the larger term
    double det;
    if (l1 >= l2)
      det = -std::expm1(l2 - l1) * std::exp(l1);
    else
      det = std::expm1(l1 - l2) * std::exp(l2);
    return (x[1] - x[0]) * det;
  }

  // n = 4: 24-term signed expansion with a shared log scale. Rows are
  // ordered w, w', x w, x w' (degree-major); this is the ordering that keeps
  // the determinant positive on increasing tuples.
  std::array<std::array<double, 4>, 4> lent;
  for (int j = 0; j < 4; ++j) {
    const double la = log_weight(params, x[j]);
    const double lb = log_weight(up, x[j]);
    const double lx = std::log(x[j]);
    lent[0][j] = la;
    lent[1][j] = lb;
    lent[2][j] = lx + la;
    lent[3][j] = lx + lb;
  }
  std::array<double, 24> logs;
  std::array<int, 24> signs;
  std::array<int, 4> perm = {0, 1, 2, 3};
  int t = 0;
  do {
    double s = 0;
    int inv = 0;
    for (int r = 0; r < 4; ++r) {
      s += lent[r][perm[r]];
      for (int q = r + 1; q < 4; ++q) inv += perm[r] > perm[q];
    }
    logs[t] = s;
    signs[t] = (inv % 2) ? -1 : 1;
    ++t;
  } while (std::next_permutation(perm.begin(), perm.end()));

  const double top = *std::max_element(logs.begin(), logs.end());
  if (!std::isfinite(top)) return 0;
  double acc = 0;
  for (int k = 0; k < 24; ++k) acc += signs[k] * std::exp(logs[k] - top);

  double vdm = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) vdm *= x[j] - x[i];
  return vdm * acc * std::exp(top);
}

OracleEval gas_marginal_density(const ModelParams& params,
                                const std::vector<double>& x, int terms) {
  check_tuple(params, x);
  if (terms < 2)
    throw std::invalid_argument("gas_marginal_density: need at least 2 terms");
  const Lattice lat(params, terms);
  const std::vector<double>& av = lat.values();

  OracleEval out;
  out.x = x;

  // Shared prefactor Delta(x)^2 prod_i w(x_i) / n in log scale.
  double lpref = -std::log(static_cast<double>(params.n));
  for (std::size_t i = 0; i < x.size(); ++i) {
    lpref += log_weight(params, x[i]);
    for (std::size_t j = i + 1; j < x.size(); ++j)
      lpref += 2.0 * std::log(x[j] - x[i]);
  }
  const double pref = std::exp(lpref);
  const double tail = lattice_tail_inv(params, av.back());

  if (params.n == 2) {
    double s = 0;
    for (double ak : av) s += -ak / ((x[0] - ak) * (x[1] - ak));
    out.value = pref * s;
    // Each dropped term is at most 1/|a_k|.
    out.truncation_bound = pref * tail;
    return out;
  }

  // n = 4: the pair sum over distinct lattice points collapses to moments
  // m_r = sum_k a_k^r |a_k| / prod_i (x_i - a_k):
  //   sum_{k<l} (a_k - a_l)^2 |a_k a_l| / (P_k P_l) = m_2 m_0 - m_1^2.
  double m0 = 0, m1 = 0, m2 = 0;
  for (double ak : av) {
    double p = 1;
    for (double xi : x) p *= xi - ak;
    const double tk = -ak / p;
    m0 += tk;
    m1 += ak * tk;
    m2 += ak * ak * tk;
  }
  out.value = pref * (m2 * m0 - m1 * m1);
  // Dropped pairs have at least one point beyond the table: such a term is
  // at most t_k / |a_l| (one side retained) or 1/(|a_k| |a_l|) scaled by
  // the last tabulated spacing (both sides dropped).
  const double deep = std::max(1.0, 1.0 / (av.back() * av.back()));
  out.truncation_bound = pref * (m0 * tail + deep * tail * tail);
  return out;
}

}  // namespace vectorgas
