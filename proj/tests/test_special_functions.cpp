#include <doctest.h>

#include <cmath>
#include <limits>

#include "test_support.hpp"
#include "vectorgas/special_functions.hpp"

using namespace vectorgas;
using testsup::bisect;
using testsup::series_bessel_j;
using testsup::series_log_bessel_i;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
const double kPi = 3.14159265358979323846;
}  // namespace

TEST_CASE("log_bessel_i boundary values") {
  CHECK(log_bessel_i(0.0, 0.0) == 0.0);
  CHECK(log_bessel_i(1.0, 0.0) == -kInf);
  CHECK(log_bessel_i(2.5, 0.0) == -kInf);
  CHECK(std::exp(log_bessel_i(0.0, 1.0)) ==
        doctest::Approx(1.2660658777520084).epsilon(1e-13));
}

TEST_CASE("log_bessel_i agrees with the ascending series") {
  for (double alpha : {0.0, 1.0, 2.5}) {
    for (double x : {0.25, 1.0, 5.0, 10.0, 30.0, 55.0}) {
      const double ref = static_cast<double>(series_log_bessel_i(alpha, x));
      CHECK(log_bessel_i(alpha, x) == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("log_bessel_i large-argument behavior") {
  // log I_0(x) = x - (1/2) log(2 pi x) + O(1/x).
  const double e50 = std::abs(log_bessel_i(0.0, 50.0) -
                              (50.0 - 0.5 * std::log(100.0 * kPi)));
  CHECK(e50 <= 0.01);
  const double e500 = std::abs(log_bessel_i(0.0, 500.0) -
                               (500.0 - 0.5 * std::log(1000.0 * kPi)));
  CHECK(e500 < e50);

  // Log-derivative stays inside (0.9, 1) across the evaluation-regime switch;
  // a jump between branches would show up as a wild difference quotient.
  for (double x = 20.0; x < 40.0; x += 0.25) {
    const double slope = (log_bessel_i(0.0, x + 0.01) - log_bessel_i(0.0, x)) / 0.01;
    CHECK(slope > 0.9);
    CHECK(slope < 1.0);
  }
}

TEST_CASE("bessel_j values and recurrence") {
  CHECK(bessel_j(0.0, 0.0) == 1.0);
  CHECK(bessel_j(1.0, 0.0) == 0.0);
  CHECK(bessel_j(2.5, 0.0) == 0.0);

  for (double alpha : {0.0, 1.0, 2.5}) {
    for (double x : {0.5, 2.0, 7.3, 15.0}) {
      const double ref = static_cast<double>(series_bessel_j(alpha, x));
      CHECK(bessel_j(alpha, x) == doctest::Approx(ref).epsilon(1e-11));
    }
  }

  // J_{a-1}(x) + J_{a+1}(x) = (2a/x) J_a(x).
  for (double x : {0.7, 3.1, 11.4}) {
    const double lhs = bessel_j(0.0, x) + bessel_j(2.0, x);
    const double rhs = 2.0 / x * bessel_j(1.0, x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("bessel_j_prime matches difference quotients") {
  for (double alpha : {0.0, 1.0, 2.5}) {
    for (double x : {0.8, 2.9, 9.6}) {
      const double h = 1e-5;
      const double fd = (bessel_j(alpha, x + h) - bessel_j(alpha, x - h)) / (2 * h);
      CHECK(bessel_j_prime(alpha, x) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("first zeros match bisection of the series") {
  const double j00 = bisect(
      [](double x) { return static_cast<double>(series_bessel_j(0.0, x)); }, 2.0, 3.0);
  CHECK(j00 == doctest::Approx(2.404825557695773).epsilon(1e-14));
  CHECK(bessel_zero(0.0, 0) == doctest::Approx(j00).epsilon(1e-13));

  const double j10 = bisect(
      [](double x) { return static_cast<double>(series_bessel_j(1.0, x)); }, 3.0, 4.5);
  CHECK(bessel_zero(1.0, 0) == doctest::Approx(j10).epsilon(1e-13));

  const double j25_0 = bisect(
      [](double x) { return static_cast<double>(series_bessel_j(2.5, x)); }, 5.0, 8.0);
  CHECK(bessel_zero(2.5, 0) == doctest::Approx(j25_0).epsilon(1e-13));
}

TEST_CASE("zero tables: residuals, ordering, spacing") {
  for (double alpha : {0.0, 1.0, 2.5}) {
    ZeroTable tab(alpha, 200);
    REQUIRE(tab.count() >= 200);
    for (int k = 0; k < tab.count(); ++k) {
      CHECK(std::abs(bessel_j(alpha, tab[k])) <= 1e-10);
      if (k > 0) CHECK(tab[k] > tab[k - 1]);
    }
    for (int k = 100; k < tab.count(); ++k) {
      const double gap = tab[k] - tab[k - 1];
      CHECK(gap >= kPi - 0.05);
      CHECK(gap <= kPi + 0.05);
    }
  }
}

TEST_CASE("consecutive high zeros are pi apart") {
  for (double alpha : {0.0, 1.0}) {
    auto tab = zero_table(alpha, 1002);
    CHECK(std::abs(((*tab)[1001] - (*tab)[1000]) - kPi) <= 1e-4);
  }
}

TEST_CASE("shared zero table grows and is reused") {
  auto t1 = zero_table(0.0, 64);
  auto t2 = zero_table(0.0, 32);
  CHECK(t2->count() >= 64);  // the grown table is shared, not rebuilt smaller
  CHECK((*t1)[10] == (*t2)[10]);
  CHECK((*t1)[10] == doctest::Approx(bessel_zero(0.0, 10)).epsilon(1e-15));
}

TEST_CASE("inverse-square sums over zeros") {
  // sum_k 1/j_{alpha,k}^2 = 1/(4(alpha+1)).
  for (double alpha : {0.0, 1.0, 2.5}) {
    ZeroTable tab(alpha, 4000);
    CHECK(std::abs(tab.inv_square_sum() - 0.25 / (1.0 + alpha)) <= 1e-6);
  }
  // The tail model makes the total insensitive to the truncation point.
  CHECK(std::abs(ZeroTable(0.0, 2000).inv_square_sum() -
                 ZeroTable(0.0, 6000).inv_square_sum()) <= 1e-7);
}

TEST_CASE("tail offset matches the large-index model") {
  ZeroTable tab(0.0, 2000);
  const double c = tab.tail_offset();
  // j_k ~ pi k + c: the model should reproduce distant zeros to o(1).
  CHECK(std::abs(kPi * 1999 + c - tab[1999]) <= 1e-3);
}

TEST_CASE("trigamma identities") {
  CHECK(trigamma(1.0) == doctest::Approx(kPi * kPi / 6.0).epsilon(1e-9));
  CHECK(trigamma(0.5) == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-9));
  for (double z : {0.3, 1.7, 9.1}) {
    CHECK(trigamma(z) - trigamma(z + 1.0) ==
          doctest::Approx(1.0 / (z * z)).epsilon(1e-12));
  }
}

TEST_CASE("Mittag-Leffler ratio of consecutive Bessel-I") {
  CHECK(ml_ratio(0.0, 0.0, 100).value == 0.0);

  // I_{a+1}(x)/I_a(x) ~ x / (2 (a+1)) near zero.
  CHECK(ml_ratio(0.0, 1e-4, 2000).value / 1e-4 ==
        doctest::Approx(0.5).epsilon(1e-4));
  CHECK(ml_ratio(1.0, 1e-4, 2000).value / 1e-4 ==
        doctest::Approx(0.25).epsilon(1e-4));

  for (double alpha : {0.0, 1.0}) {
    for (double x : {0.5, 1.0, 4.0, 10.0}) {
      const MlRatio r = ml_ratio(alpha, x, 20000);
      const double ref = static_cast<double>(
          series_log_bessel_i(alpha + 1.0, x) - series_log_bessel_i(alpha, x));
      const double diff = std::abs(r.value - std::exp(ref));
      CHECK(diff <= r.tail_bound + 1e-12);
      CHECK(diff <= 1e-6);
    }
  }
}

TEST_CASE("truncated Mittag-Leffler sums increase with the cutoff") {
  double prev = -1.0;
  for (int terms : {10, 100, 1000, 5000}) {
    const MlRatio r = ml_ratio(0.0, 3.0, terms);
    CHECK(r.truncated_sum > prev);
    prev = r.truncated_sum;
  }
  // and the tail bound shrinks
  CHECK(ml_ratio(0.0, 3.0, 5000).tail_bound < ml_ratio(0.0, 3.0, 10).tail_bound);
}
