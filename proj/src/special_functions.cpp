#include "vectorgas/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace vectorgas {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();

void check_order_arg(double alpha, double x) {
  if (!(alpha >= 0) || std::isnan(alpha))
    throw std::domain_error("bessel: order must be >= 0");
  if (!(x >= 0) || std::isnan(x))
    throw std::domain_error("bessel: argument must be >= 0");
}

// log I_alpha(x) by the power series, scaled by the first term so the
// running sum stays near 1: I = t0 * sum c_k, c_0 = 1,
// c_{k+1} = c_k * (x/2)^2 / ((k+1)(k+alpha+1)).
double log_i_series(double alpha, double x) {
  const double lt0 = alpha * std::log(0.5 * x) - std::lgamma(alpha + 1.0);
  const double q = 0.25 * x * x;
  double c = 1.0, s = 1.0;
  for (int k = 1; k < 200000; ++k) {
    c *= q / (k * (k + alpha));
    s += c;
    if (c < s * 1e-18 && k > 0.5 * x) break;
  }
  return lt0 + std::log(s);
}

// Whether the scaled series sum I/t0 fits in a double (and is cheap enough).
bool series_safe_i(double alpha, double x) {
  double lt0 = alpha * std::log(0.5 * x) - std::lgamma(alpha + 1.0);
  double log_sum_bound = x - 0.5 * std::log(2 * kPi * x) - lt0;
  return log_sum_bound < 690.0 && x < 20000.0;
}

// log I_alpha(x) ~ x - log(2 pi x)/2 + log S, S = 1 + sum_k t_k with
// t_k = t_{k-1} * (-(mu - (2k-1)^2)) / (8 x k), mu = 4 alpha^2.
// Asymptotic series: truncate at the smallest term; *err_rel reports it.
double log_i_asymptotic(double alpha, double x, double* err_rel) {
  const double mu = 4.0 * alpha * alpha;
  double t = 1.0, s = 1.0, min_t = kInf;
  for (int k = 1; k <= 60; ++k) {
    double odd = 2.0 * k - 1.0;
    double t_next = t * -(mu - odd * odd) / (8.0 * x * k);
    if (std::abs(t_next) >= std::abs(t) && k > 1) break;  // started diverging
    t = t_next;
    s += t;
    min_t = std::min(min_t, std::abs(t));
    if (std::abs(t) < 1e-18 * std::abs(s)) break;
  }
  if (!(s > 0)) {  // expansion useless here
    *err_rel = kInf;
    return 0;
  }
  *err_rel = min_t / s;
  return x - 0.5 * std::log(2 * kPi * x) + std::log(s);
}

// Crude upper bound for log I_alpha(x), used to decide where the J series
// keeps full absolute accuracy (cancellation error ~ I_alpha(x) * eps).
double log_i_scale_bound(double alpha, double x) {
  if (x <= 0) return 0;
  if (alpha == 0) return x;
  double r = std::hypot(alpha, x);
  return r - alpha * std::log((alpha + r) / x) - 0.5 * std::log(2 * kPi * r) + 1.0;
}

// J_alpha(x) by the alternating power series; valid while the term scale
// (~ I_alpha(x)) stays small enough that cancellation is below ~1e-11.
double bessel_j_series(double alpha, double x) {
  const double lt0 = alpha * std::log(0.5 * x) - std::lgamma(alpha + 1.0);
  const double q = 0.25 * x * x;
  double c = 1.0, s = 1.0;
  for (int k = 1; k < 10000; ++k) {
    c *= -q / (k * (k + alpha));
    s += c;
    if (std::abs(c) < 1e-18 * (std::abs(s) + 1.0) && k > 0.5 * x) break;
  }
  return std::exp(lt0) * s;
}

// Hankel large-argument expansion:
//   J_alpha(x) = sqrt(2/(pi x)) [P cos(chi) - Q sin(chi)],
//   chi = x - (alpha/2 + 1/4) pi,
// with P, Q asymptotic series in 1/(8x)^2 truncated at their smallest terms.
double bessel_j_hankel(double alpha, double x) {
  const double mu = 4.0 * alpha * alpha;
  const double w = 8.0 * x;
  double p = 1.0, tp = 1.0;
  for (int m = 1; m <= 45; ++m) {
    double f1 = mu - (4.0 * m - 3.0) * (4.0 * m - 3.0);
    double f2 = mu - (4.0 * m - 1.0) * (4.0 * m - 1.0);
    double tn = tp * -(f1 * f2) / ((2.0 * m - 1.0) * (2.0 * m) * w * w);
    if (std::abs(tn) >= std::abs(tp) && m > 1) break;
    tp = tn;
    p += tp;
    if (std::abs(tp) < 1e-18) break;
  }
  double q = (mu - 1.0) / w, tq = q;
  for (int m = 1; m <= 45; ++m) {
    double f1 = mu - (4.0 * m - 1.0) * (4.0 * m - 1.0);
    double f2 = mu - (4.0 * m + 1.0) * (4.0 * m + 1.0);
    double tn = tq * -(f1 * f2) / ((2.0 * m) * (2.0 * m + 1.0) * w * w);
    if (std::abs(tn) >= std::abs(tq) && m > 1) break;
    tq = tn;
    q += tq;
    if (std::abs(tq) < 1e-18) break;
  }
  const double chi = x - (0.5 * alpha + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double log_bessel_i(double alpha, double x) {
  check_order_arg(alpha, x);
  if (x == 0) return alpha == 0 ? 0.0 : -kInf;
  if (x <= 30.0) return log_i_series(alpha, x);
  double err = 0;
  double la = log_i_asymptotic(alpha, x, &err);
  if (err < 1e-13) return la;
  if (series_safe_i(alpha, x)) return log_i_series(alpha, x);
  return la;  // best effort: only reachable for enormous order and argument
}

double bessel_j(double alpha, double x) {
  check_order_arg(alpha, x);
  if (x == 0) return alpha == 0 ? 1.0 : 0.0;
  if (x <= 13.0 || log_i_scale_bound(alpha, x) < std::log(1e5))
    return bessel_j_series(alpha, x);
  return bessel_j_hankel(alpha, x);
}

double bessel_j_prime(double alpha, double x) {
  check_order_arg(alpha, x);
  if (x == 0) {
    if (alpha == 0) return 0.0;
    if (alpha == 1) return 0.5;
    return alpha < 1 ? kInf : 0.0;
  }
  return (alpha / x) * bessel_j(alpha, x) - bessel_j(alpha + 1.0, x);
}

namespace {

// McMahon expansion for the (k+1)-th positive zero (k is 0-based).
double mcmahon_guess(double alpha, int k) {
  const double mu = 4.0 * alpha * alpha;
  const double beta = (k + 0.5 * alpha + 0.75) * kPi;
  const double b8 = 8.0 * beta;
  double j = beta - (mu - 1.0) / b8;
  j -= 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 * b8 * b8);
  double b5 = b8 * b8 * b8 * b8 * b8;
  j -= 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b5);
  return j;
}

// Bisection + Newton polish inside a bracket with a sign change.
double refine_zero(double alpha, double lo, double hi) {
  double flo = bessel_j(alpha, lo);
  for (int it = 0; it < 80 && hi - lo > 1e-9 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = bessel_j(alpha, mid);
    if ((flo <= 0) == (fm <= 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double z = 0.5 * (lo + hi);
  for (int it = 0; it < 6; ++it) {
    double f = bessel_j(alpha, z);
    double fp = bessel_j_prime(alpha, z);
    if (fp == 0) break;
    double step = f / fp;
    double zn = z - step;
    if (zn <= lo || zn >= hi) break;  // keep the bracket guarantee
    z = zn;
    if (std::abs(step) < 1e-14 * z) break;
  }
  return z;
}

// Scan right from `start` in steps of `h` until J changes sign, then refine.
double scan_for_zero(double alpha, double start, double h) {
  double a = start;
  double fa = bessel_j(alpha, a);
  for (int it = 0; it < 100000; ++it) {
    double b = a + h;
    double fb = bessel_j(alpha, b);
    if ((fa <= 0) != (fb <= 0)) return refine_zero(alpha, a, b);
    a = b;
    fa = fb;
  }
  throw std::runtime_error("bessel_zero: sign change not found");
}

double next_zero(double alpha, int k, double prev) {
  if (k >= 5) {
    // McMahon is within a small fraction of the gap here; Newton from it.
    double z = mcmahon_guess(alpha, k);
    for (int it = 0; it < 8; ++it) {
      double f = bessel_j(alpha, z);
      double fp = bessel_j_prime(alpha, z);
      if (fp == 0) break;
      double step = f / fp;
      z -= step;
      if (std::abs(step) < 1e-14 * z) break;
    }
    bool ok = z > prev + 0.5 && z < prev + 2.0 * kPi &&
              std::abs(bessel_j(alpha, z)) <= 1e-10;
    if (ok) return z;
    // fall through to the scan if Newton wandered
  }
  double h = 0.45 * std::max(1.0, std::cbrt(std::max(alpha, 1.0)));
  double start = k == 0 ? std::max(0.05, alpha * 0.98 + 0.05) : prev + 0.25 * h;
  return scan_for_zero(alpha, start, h);
}

}  // namespace

ZeroTable::ZeroTable(double alpha, int count) : alpha_(alpha) {
  if (!(alpha >= 0)) throw std::domain_error("ZeroTable: order must be >= 0");
  if (count <= 0) throw std::domain_error("ZeroTable: count must be positive");
  zeros_.reserve(static_cast<size_t>(count));
  double prev = 0;
  for (int k = 0; k < count; ++k) {
    double z = next_zero(alpha, k, prev);
    if (z <= prev) throw std::runtime_error("ZeroTable: zeros not increasing");
    zeros_.push_back(z);
    prev = z;
  }
}

double ZeroTable::tail_offset() const {
  return zeros_.back() - kPi * (count() - 1);
}

double ZeroTable::inv_square_sum() const {
  // Sum smallest terms last for rounding; tail via sum_{k>=K} 1/(pi k + c)^2
  // = trigamma(K + c/pi) / pi^2.
  double s = 0;
  for (int k = count() - 1; k >= 0; --k) s += 1.0 / (zeros_[k] * zeros_[k]);
  double c = tail_offset();
  return s + trigamma(count() + c / kPi) / (kPi * kPi);
}

namespace {

std::mutex g_table_mutex;
std::map<double, std::shared_ptr<const ZeroTable>> g_tables;

}  // namespace

std::shared_ptr<const ZeroTable> zero_table(double alpha, int min_count) {
  if (min_count <= 0) min_count = 1;
  {
    std::lock_guard<std::mutex> lock(g_table_mutex);
    auto it = g_tables.find(alpha);
    if (it != g_tables.end() && it->second->count() >= min_count)
      return it->second;
  }
  int have = 0;
  {
    std::lock_guard<std::mutex> lock(g_table_mutex);
    auto it = g_tables.find(alpha);
    if (it != g_tables.end()) have = it->second->count();
  }
  int target = std::max({min_count, 2 * have, 256});
  auto fresh = std::make_shared<const ZeroTable>(alpha, target);
  std::lock_guard<std::mutex> lock(g_table_mutex);
  auto& slot = g_tables[alpha];
  if (!slot || slot->count() < fresh->count()) slot = fresh;
  return slot;
}

double bessel_zero(double alpha, int k) {
  if (k < 0) throw std::domain_error("bessel_zero: index must be >= 0");
  return (*zero_table(alpha, k + 1))[k];
}

MlRatio ml_ratio(double alpha, double x, int terms) {
  check_order_arg(alpha, x);
  if (terms <= 0) throw std::domain_error("ml_ratio: terms must be positive");
  MlRatio out;
  if (x == 0) return out;
  auto zt = zero_table(alpha, terms);
  double s = 0;
  for (int k = terms - 1; k >= 0; --k) {
    double j = (*zt)[k];
    s += 1.0 / (x * x + j * j);
  }
  out.truncated_sum = 2.0 * x * s;

  // Zeros beyond the table are modeled as pi*k + c; the midpoint-rule
  // integral of f(u) = 2x/(x^2+u^2) from u0 = j_{K-1} + pi/2 captures the
  // tail, leaving an Euler-Maclaurin remainder plus the model deviation.
  double jlast = (*zt)[terms - 1];
  double u0 = jlast + 0.5 * kPi;
  double tail = (2.0 / kPi) * (0.5 * kPi - std::atan(u0 / x));
  double f_u0 = 2.0 * x / (x * x + u0 * u0);
  double fp_u0 = 4.0 * x * u0 / ((x * x + u0 * u0) * (x * x + u0 * u0));
  double mu = 4.0 * alpha * alpha;
  double model_dev = std::abs(mu - 1.0) / (8.0 * u0);
  out.value = out.truncated_sum + tail;
  out.tail_bound = (kPi / 6.0) * fp_u0 + model_dev * f_u0 + 1e-16 * out.value;
  return out;
}

double trigamma(double z) {
  if (!(z > 0)) throw std::domain_error("trigamma: argument must be > 0");
  double r = 0;
  while (z < 10) {
    r += 1.0 / (z * z);
    z += 1;
  }
  double iz = 1.0 / z, iz2 = iz * iz;
  // psi'(z) ~ 1/z + 1/(2z^2) + 1/(6z^3) - 1/(30z^5) + 1/(42z^7)
  return r + iz * (1.0 + iz * (0.5 + iz * (1.0 / 6.0 - iz2 * (1.0 / 30.0 - iz2 / 42.0))));
}

}  // namespace vectorgas
