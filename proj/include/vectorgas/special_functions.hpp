#pragma once

#include <memory>
#include <vector>

namespace vectorgas {

/// log I_alpha(x) for alpha >= 0, x >= 0; returns -inf iff x == 0 and alpha > 0.
double log_bessel_i(double alpha, double x);

/// J_alpha(x) for alpha >= 0, x >= 0.
double bessel_j(double alpha, double x);

/// d/dx J_alpha(x), via J'_alpha = (alpha/x) J_alpha - J_{alpha+1}.
double bessel_j_prime(double alpha, double x);

// Positive zeros j_{alpha,0} < j_{alpha,1} < ... of J_alpha, computed
// sequentially (McMahon guess + Newton, bisection fallback) and cached.
class ZeroTable {
public:
  ZeroTable(double alpha, int count);

  double alpha() const { return alpha_; }
  int count() const { return static_cast<int>(zeros_.size()); }
  double operator[](int k) const { return zeros_[static_cast<size_t>(k)]; }
  const std::vector<double>& zeros() const { return zeros_; }

  // Offset c of the large-k model j_k ~ pi*k + c, fitted from the last zero.
  double tail_offset() const;

  // sum_k 1/j_k^2 over all k, truncated sum plus analytic tail from the
  // fitted model; exact value is 1/(4(1+alpha)).
  double inv_square_sum() const;

private:
  double alpha_;
  std::vector<double> zeros_;
};

// Shared table, grown on demand; safe for concurrent readers.
std::shared_ptr<const ZeroTable> zero_table(double alpha, int min_count);

/// k-th positive zero of J_alpha (k is 0-based).
double bessel_zero(double alpha, int k);

// Truncated Mittag-Leffler expansion of I_{alpha+1}(x)/I_alpha(x).
// value = 2x sum_{k<K} 1/(x^2 + j_k^2) + analytic tail estimate;
// truncated_sum omits the tail (monotone increasing in K);
// |value - I_{alpha+1}/I_alpha| <= tail_bound.
struct MlRatio {
  double value = 0;
  double truncated_sum = 0;
  double tail_bound = 0;
};

MlRatio ml_ratio(double alpha, double x, int terms);

// psi'(z) for z > 0; used for the Sum 1/(pi k + c)^2 tail closed form.
double trigamma(double z);

}  // namespace vectorgas
