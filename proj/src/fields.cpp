#include "vectorgas/fields.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vectorgas/special_functions.hpp"

namespace vectorgas {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double v_n(const ModelParams& p, double x) {
  p.validate();
  if (!(x >= 0)) throw std::domain_error("v_n: x must be >= 0");
  if (x == 0) return p.alpha > 0 ? kInf : 0.0;
  double y = 2.0 * p.n * std::sqrt(p.a * x);
  double logw = 0.5 * p.alpha * std::log(x) + log_bessel_i(p.alpha, y) - p.n * x;
  return -logw / p.n;
}

double q_field(double a, double x) {
  if (!(a >= 0)) throw std::domain_error("q_field: a must be >= 0");
  if (!(x >= 0)) throw std::domain_error("q_field: x must be >= 0");
  return x - 2.0 * std::sqrt(a * x);
}

double script_v(double a, double x) {
  return q_field(a, x) - 0.75 * std::log1p(x * x);
}

double script_v(const ModelParams& p, double x) {
  return v_n(p, x) - 0.75 * std::log1p(x * x);
}

double script_v_angle(double a, double phi) {
  if (!(phi >= -kPi && phi <= kPi))
    throw std::domain_error("script_v_angle: angle outside [-pi, pi]");
  if (phi == kPi) return kInf;
  double x = std::tan(0.5 * phi);
  if (x < 0) throw std::domain_error("script_v_angle: field lives on R+");
  // log(1 + x^2) = -2 log|cos(phi/2)|, stable for angles near pi.
  double l = -2.0 * std::log(std::abs(std::cos(0.5 * phi)));
  return q_field(a, x) - 0.75 * l;
}

FieldSpec make_field(FieldSpec::Kind kind, double a,
                     std::function<double(double)> evaluator) {
  if (!(a >= 0)) throw std::domain_error("make_field: a must be >= 0");
  FieldSpec f;
  f.kind = kind;
  f.a = a;
  if (kind == FieldSpec::Kind::wishart) {
    f.v = [](double x) { return x; };
    f.growth_margin = kInf;  // linear growth dominates the logarithm
    return f;
  }
  if (!evaluator) throw std::domain_error("make_field: custom field needs an evaluator");
  f.v = std::move(evaluator);
  double margin = kInf;
  for (double x : {1e2, 1e3, 1e4, 1e5}) {
    double val = f.v(x);
    if (!std::isfinite(val))
      throw std::domain_error("make_field: evaluator not finite at probe point");
    double proxy = (val - 2.0 * std::sqrt(a * x)) / (2.0 * std::log(x));
    margin = std::min(margin, proxy - 1.0);
  }
  f.growth_margin = margin;
  if (!(margin >= 1e-3))
    throw std::domain_error(
        "make_field: field fails the growth condition (V - 2 sqrt(ax) must "
        "outgrow 2 log x)");
  return f;
}

}  // namespace vectorgas
