#pragma once

#include <functional>
#include <string>

#include "vectorgas/model_params.hpp"

namespace vectorgas {

// Finite-n external field v_n(x) = -(1/n) log w_n(x) with
// w_n(x) = x^{alpha/2} I_alpha(2 n sqrt(a x)) e^{-n x}.
// At x = 0: +inf when alpha > 0, 0 when alpha = 0.
double v_n(const ModelParams& p, double x);

// Limiting field on the line: q(x) = x - 2 sqrt(a x).
double q_field(double a, double x);

// Field seen on the sphere through the inverse stereographic map:
// x - 2 sqrt(a x) - (3/4) log(1 + x^2); +inf at the point at infinity.
double script_v(double a, double x);
double script_v(const ModelParams& p, double x);  // finite-n variant
double script_v_angle(double a, double phi);      // phi = pi -> +inf

// Confining potential V for the equilibrium problem. Custom fields must
// outgrow the logarithm: (V(x) - 2 sqrt(a x)) / (2 log x) >= 1 + 1e-3 at the
// probe points {1e2, 1e3, 1e4, 1e5}.
struct FieldSpec {
  enum class Kind { wishart, custom };

  Kind kind = Kind::wishart;
  double a = 1.0;
  std::function<double(double)> v;  // V(x); identity for wishart
  double growth_margin = 0.0;       // min over probes of the growth proxy
};

FieldSpec make_field(FieldSpec::Kind kind, double a,
                     std::function<double(double)> evaluator = {});

}  // namespace vectorgas
