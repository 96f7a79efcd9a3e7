#include "vectorgas/equilibrium_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "vectorgas/energy.hpp"

namespace vectorgas {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Assembled {
  MatrixXd g;
  VectorXd f;
  int m = 0;
  int n = 0;
};

// Stacked quadratic model: G = [[2 Kmu, -Kc], [-Kc^T, 2 Knu]] so that
// 1/2 w^T G w reproduces E(mu) + E(nu) - E(mu, nu) cell for cell.
Assembled assemble(const EquilibriumProblem& prob) {
  Assembled a;
  a.m = prob.mu_grid().size();
  a.n = prob.nu_grid().size();
  const MatrixXd kmu = self_kernel_matrix(prob.mu_grid());
  const MatrixXd knu = self_kernel_matrix(prob.nu_grid());
  const MatrixXd kc = cross_kernel_matrix(prob.mu_grid(), prob.nu_grid());
  a.g.resize(a.m + a.n, a.m + a.n);
  a.g.topLeftCorner(a.m, a.m) = 2.0 * kmu;
  a.g.topRightCorner(a.m, a.n) = -kc;
  a.g.bottomLeftCorner(a.n, a.m) = -kc.transpose();
  a.g.bottomRightCorner(a.n, a.n) = 2.0 * knu;
  a.f.setZero(a.m + a.n);
  const std::vector<double> q = prob.field_values();
  for (int i = 0; i < a.m; ++i) a.f[i] = q[i];
  return a;
}

double quad_objective(const Assembled& a, const VectorXd& w) {
  return 0.5 * w.dot(a.g * w) + a.f.dot(w);
}

double lambda_max(const MatrixXd& g) {
  VectorXd v = VectorXd::Ones(g.rows());
  for (int i = 0; i < g.rows(); ++i)
    v[i] += 0.01 * static_cast<double>((i * 2654435761u) % 97);
  v.normalize();
  double lam = 1;
  for (int it = 0; it < 100; ++it) {
    VectorXd u = g * v;
    const double nn = u.norm();
    if (nn < 1e-300) return 1;
    u /= nn;
    if (it > 5 && std::abs(nn - lam) <= 1e-9 * nn) return nn;
    lam = nn;
    v = u;
  }
  return lam;
}

// Nudges the listed coordinates so the subset sums hit their targets
// exactly despite clamping, staying inside [0, cap].
void restore_sum(VectorXd* w, const std::vector<int>& idx, double lo_all,
                 const std::vector<double>* caps, int cap_offset, double target,
                 double current) {
  for (int round = 0; round < 8 && !idx.empty(); ++round) {
    const double diff = target - current;
    if (diff == 0) break;
    const double per = diff / static_cast<double>(idx.size());
    current = target;
    for (int gi : idx) {
      double v = (*w)[gi] + per;
      const double hi =
          caps ? (*caps)[gi - cap_offset] : std::numeric_limits<double>::infinity();
      v = std::clamp(v, lo_all, hi);
      current += v - ((*w)[gi] + per);
      (*w)[gi] = v;
    }
  }
}

VectorXd start_point(const EquilibriumProblem& prob, int which) {
  const int m = prob.mu_grid().size();
  const int n = prob.nu_grid().size();
  const std::vector<double>& caps = prob.caps();
  const double cap_total = std::accumulate(caps.begin(), caps.end(), 0.0);
  VectorXd w(m + n);
  if (which == 0) {
    for (int i = 0; i < m; ++i) w[i] = 1.0 / m;
    for (int j = 0; j < n; ++j)
      w[m + j] = cap_total > 0 ? caps[j] * (prob.nu_mass() / cap_total) : 0.0;
  } else {
    const double ramp_total = 0.5 * m * (m + 1);
    for (int i = 0; i < m; ++i) w[i] = (i + 1) / ramp_total;
    double rem = prob.nu_mass();
    for (int j = 0; j < n; ++j) {
      const double take = std::min(caps[j], rem);
      w[m + j] = take;
      rem -= take;
    }
  }
  return w;
}

VectorXd project_feasible(const EquilibriumProblem& prob, const VectorXd& y) {
  const int m = prob.mu_grid().size();
  const int n = prob.nu_grid().size();
  std::vector<double> mu(y.data(), y.data() + m);
  std::vector<double> nu(y.data() + m, y.data() + m + n);
  mu = project_simplex(std::move(mu), 1.0);
  nu = project_capped_simplex(std::move(nu), prob.caps(), prob.nu_mass());
  VectorXd out(m + n);
  for (int i = 0; i < m; ++i) out[i] = mu[i];
  for (int j = 0; j < n; ++j) out[m + j] = nu[j];
  return out;
}

// Solves the equality-constrained problem on the active sets read off w:
// mu cells with visible mass and nu cells strictly between their bounds are
// unknowns, capped nu cells are pinned, the rest is zero. Returns true and
// updates (w, fw) when the refined point is feasible and no worse; the
// caller re-tests optimality afterwards, so a wrong guess is harmless.
bool try_polish(const EquilibriumProblem& prob, const Assembled& a, VectorXd* w,
                double* fw) {
  const int m = a.m;
  const int n = a.n;
  const std::vector<double>& caps = prob.caps();

  const double mu_thresh = 1e-10 / m;
  std::vector<int> unknown;
  std::vector<char> kind(m + n, 0);  // 0 zero, 1 unknown, 2 pinned at cap
  for (int i = 0; i < m; ++i)
    if ((*w)[i] > mu_thresh) {
      kind[i] = 1;
      unknown.push_back(i);
    }
  const int k1 = static_cast<int>(unknown.size());
  if (k1 == 0) return false;
  double pinned_nu = 0;
  for (int j = 0; j < n; ++j) {
    const double c = caps[j];
    const double eps = std::max(1e-14, 1e-8 * c);
    const double v = (*w)[m + j];
    if (prob.nu_mass() == 0 || v <= eps) continue;
    if (v >= c - eps) {
      kind[m + j] = 2;
      pinned_nu += c;
    } else {
      kind[m + j] = 1;
      unknown.push_back(m + j);
    }
  }
  const int k2 = static_cast<int>(unknown.size()) - k1;
  const bool with_nu = k2 > 0;
  if (!with_nu && std::abs(pinned_nu - prob.nu_mass()) > 1e-9) return false;
  const double free_nu_mass = prob.nu_mass() - pinned_nu;
  if (free_nu_mass < -1e-12) return false;

  VectorXd wfix = VectorXd::Zero(m + n);
  for (int j = 0; j < n; ++j)
    if (kind[m + j] == 2) wfix[m + j] = caps[j];
  const VectorXd gfix = a.g * wfix;

  const int nmul = with_nu ? 2 : 1;
  const int k = k1 + k2;
  MatrixXd kkt = MatrixXd::Zero(k + nmul, k + nmul);
  VectorXd rhs = VectorXd::Zero(k + nmul);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) kkt(r, c) = a.g(unknown[r], unknown[c]);
    kkt(r, k) = r < k1 ? 1 : 0;
    kkt(k, r) = r < k1 ? 1 : 0;
    if (with_nu) {
      kkt(r, k + 1) = r < k1 ? 0 : 1;
      kkt(k + 1, r) = r < k1 ? 0 : 1;
    }
    rhs[r] = -a.f[unknown[r]] - gfix[unknown[r]];
  }
  rhs[k] = 1.0;
  if (with_nu) rhs[k + 1] = free_nu_mass;

  Eigen::FullPivLU<MatrixXd> lu(kkt);
  if (!lu.isInvertible()) return false;
  const VectorXd sol = lu.solve(rhs);

  VectorXd wn = wfix;
  for (int r = 0; r < k1; ++r) {
    if (sol[r] < -1e-10) return false;
    wn[unknown[r]] = std::max(0.0, sol[r]);
  }
  std::vector<int> mu_unknown(unknown.begin(), unknown.begin() + k1);
  std::vector<int> nu_unknown(unknown.begin() + k1, unknown.end());
  for (int r = 0; r < k2; ++r) {
    const int gj = nu_unknown[r];
    const double c = caps[gj - m];
    if (sol[k1 + r] < -1e-10 || sol[k1 + r] > c + 1e-10) return false;
    wn[gj] = std::clamp(sol[k1 + r], 0.0, c);
  }
  restore_sum(&wn, mu_unknown, 0.0, nullptr, 0, 1.0, wn.head(m).sum());
  restore_sum(&wn, nu_unknown, 0.0, &caps, m, prob.nu_mass(), wn.tail(n).sum());

  const double fn = quad_objective(a, wn);
  if (!(fn <= *fw + 1e-9 * (1.0 + std::abs(*fw)))) return false;
  *w = wn;
  *fw = fn;
  return true;
}

}  // namespace

EquilibriumProblem::EquilibriumProblem(double a, FieldSpec field,
                                       GridMeasure mu_grid, GridMeasure nu_grid,
                                       double nu_mass)
    : a_(a),
      field_(std::move(field)),
      mu_grid_(std::move(mu_grid)),
      nu_grid_(std::move(nu_grid)),
      nu_mass_(nu_mass) {
  if (!(a_ >= 0)) throw std::invalid_argument("EquilibriumProblem: a must be >= 0");
  if (!(nu_mass_ >= 0))
    throw std::invalid_argument("EquilibriumProblem: nu_mass must be >= 0");
  if (field_.a != a_)
    throw std::invalid_argument("EquilibriumProblem: field built for other a");
  if (!field_.v)
    throw std::invalid_argument("EquilibriumProblem: field has no evaluator");
  if (mu_grid_.left_edge(0) < -1e-12)
    throw std::invalid_argument("EquilibriumProblem: mu grid must sit in [0, inf)");
  if (nu_grid_.right_edge(nu_grid_.size() - 1) > 1e-12)
    throw std::invalid_argument("EquilibriumProblem: nu grid must sit in (-inf, 0]");

  caps_.resize(nu_grid_.size());
  if (a_ > 0) {
    const ConstraintMeasure sigma(a_);
    for (int j = 0; j < nu_grid_.size(); ++j)
      caps_[j] = sigma.interval_mass(nu_grid_.left_edge(j), nu_grid_.right_edge(j));
  }
  if (nu_mass_ > 0) {
    const double total = std::accumulate(caps_.begin(), caps_.end(), 0.0);
    if (total < nu_mass_ + 1e-9)
      throw std::invalid_argument(
          "EquilibriumProblem: constraint caps cannot carry the nu mass");
  }
}

EquilibriumProblem EquilibriumProblem::standard(double a, int mu_cells,
                                                int nu_cells) {
  const double root = std::sqrt(std::max(0.0, a));
  return standard(a, mu_cells, nu_cells, 4.0 * (1.0 + root) * (1.0 + root),
                  16.0 * std::max(1.0, a));
}

EquilibriumProblem EquilibriumProblem::standard(double a, int mu_cells,
                                                int nu_cells, double r,
                                                double s) {
  if (mu_cells < 2 || nu_cells < 2)
    throw std::invalid_argument("EquilibriumProblem: need at least 2 cells per grid");
  if (!(r > 0) || !(s > 0))
    throw std::invalid_argument("EquilibriumProblem: domain bounds must be positive");

  // nu cells shrink geometrically toward 0 where the sigma density blows up.
  const double rho = 1.1;
  std::vector<double> widths(nu_cells);
  double total = 0;
  double cur = 1;
  for (int kk = 0; kk < nu_cells; ++kk) {
    widths[kk] = cur;
    total += cur;
    cur /= rho;
  }
  std::vector<double> edges(nu_cells + 1);
  edges[nu_cells] = 0;
  for (int kk = nu_cells - 1; kk >= 0; --kk)
    edges[kk] = edges[kk + 1] - widths[kk] * (s / total);

  return EquilibriumProblem(
      a, make_field(FieldSpec::Kind::wishart, a),
      GridMeasure::uniform(0.0, r, mu_cells, 0.0),
      GridMeasure(std::move(edges), std::vector<double>(nu_cells, 0.0)), 0.5);
}

EquilibriumProblem EquilibriumProblem::single(double a, int mu_cells, double r) {
  if (mu_cells < 2)
    throw std::invalid_argument("EquilibriumProblem: need at least 2 cells");
  return EquilibriumProblem(a, make_field(FieldSpec::Kind::wishart, a),
                            GridMeasure::uniform(0.0, r, mu_cells, 0.0),
                            GridMeasure::uniform(-1.0, 0.0, 4, 0.0), 0.0);
}

std::vector<double> EquilibriumProblem::field_values() const {
  std::vector<double> q(mu_grid_.size());
  for (int i = 0; i < mu_grid_.size(); ++i) {
    const double x = std::max(0.0, mu_grid_.point(i));
    q[i] = field_.v(x) - 2.0 * std::sqrt(a_ * x);
  }
  return q;
}

std::vector<double> project_simplex(std::vector<double> v, double mass) {
  if (v.empty()) throw std::invalid_argument("project_simplex: empty input");
  if (!(mass >= 0)) throw std::invalid_argument("project_simplex: negative mass");
  if (mass == 0) return std::vector<double>(v.size(), 0.0);

  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cum = 0;
  double tau = sorted[0] - mass;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cum += sorted[i];
    const double t = (cum - mass) / static_cast<double>(i + 1);
    if (sorted[i] > t)
      tau = t;
    else
      break;
  }
  double sum = 0;
  for (double& x : v) {
    x = std::max(x - tau, 0.0);
    sum += x;
  }
  // pin the total exactly despite round-off
  for (int round = 0; round < 8 && sum != mass; ++round) {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] > 0) pos.push_back(i);
    if (pos.empty()) break;
    const double per = (mass - sum) / static_cast<double>(pos.size());
    sum = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] > 0) v[i] = std::max(0.0, v[i] + per);
      sum += v[i];
    }
  }
  return v;
}

std::vector<double> project_capped_simplex(std::vector<double> v,
                                           const std::vector<double>& caps,
                                           double mass) {
  if (v.size() != caps.size())
    throw std::invalid_argument("project_capped_simplex: size mismatch");
  if (v.empty()) throw std::invalid_argument("project_capped_simplex: empty input");
  if (!(mass >= 0))
    throw std::invalid_argument("project_capped_simplex: negative mass");
  double cap_total = 0;
  for (double c : caps) {
    if (!(c >= 0)) throw std::invalid_argument("project_capped_simplex: negative cap");
    cap_total += c;
  }
  if (mass == 0) return std::vector<double>(v.size(), 0.0);
  if (cap_total < mass * (1 - 1e-12))
    throw std::invalid_argument("project_capped_simplex: caps below requested mass");

  const auto filled = [&](double tau) {
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += std::clamp(v[i] - tau, 0.0, caps[i]);
    return s;
  };
  double lo = v[0] - caps[0];
  double hi = v[0];
  for (std::size_t i = 0; i < v.size(); ++i) {
    lo = std::min(lo, v[i] - caps[i]);
    hi = std::max(hi, v[i]);
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (filled(mid) >= mass)
      lo = mid;
    else
      hi = mid;
  }
  const double tau = 0.5 * (lo + hi);
  double sum = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = std::clamp(v[i] - tau, 0.0, caps[i]);
    sum += v[i];
  }
  // hand the bisection residual to the strictly interior coordinates
  for (int round = 0; round < 8 && sum != mass; ++round) {
    std::vector<std::size_t> interior;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] > 0 && v[i] < caps[i]) interior.push_back(i);
    if (interior.empty()) break;
    const double per = (mass - sum) / static_cast<double>(interior.size());
    for (std::size_t i : interior) v[i] = std::clamp(v[i] + per, 0.0, caps[i]);
    sum = 0;
    for (double x : v) sum += x;
  }
  return v;
}

double objective(const EquilibriumProblem& prob, const std::vector<double>& mu_w,
                 const std::vector<double>& nu_w) {
  const int m = prob.mu_grid().size();
  const int n = prob.nu_grid().size();
  if (static_cast<int>(mu_w.size()) != m || static_cast<int>(nu_w.size()) != n)
    throw std::invalid_argument("objective: weight size mismatch");
  double mu_sum = 0, nu_sum = 0;
  for (double w : mu_w) {
    if (w < -1e-12) throw std::invalid_argument("objective: negative mu weight");
    mu_sum += w;
  }
  for (int j = 0; j < n; ++j) {
    if (nu_w[j] < -1e-12) throw std::invalid_argument("objective: negative nu weight");
    if (nu_w[j] > prob.caps()[j] + 1e-9)
      throw std::invalid_argument("objective: nu weight above its cap");
    nu_sum += nu_w[j];
  }
  if (std::abs(mu_sum - 1.0) > 1e-6)
    throw std::invalid_argument("objective: mu mass must be 1");
  if (std::abs(nu_sum - prob.nu_mass()) > 1e-6)
    throw std::invalid_argument("objective: nu mass mismatch");

  const GridMeasure mu = prob.mu_grid().with_weights(mu_w);
  const GridMeasure nu = prob.nu_grid().with_weights(nu_w);
  double field = 0;
  const std::vector<double> q = prob.field_values();
  for (int i = 0; i < m; ++i) field += mu_w[i] * q[i];
  double total = log_energy(mu) + field;
  if (prob.nu_mass() > 0)
    total += log_energy(nu) - mutual_energy(mu, nu);
  return total;
}

EquilibriumSolution solve(const EquilibriumProblem& prob,
                          const SolveOptions& opt) {
  if (!(opt.tol > 0)) throw std::invalid_argument("solve: tol must be > 0");
  if (opt.max_iter < 1) throw std::invalid_argument("solve: max_iter must be >= 1");
  if (opt.start != 0 && opt.start != 1)
    throw std::invalid_argument("solve: start must be 0 or 1");

  const Assembled a = assemble(prob);
  const double lmax = lambda_max(a.g);
  const double step0 = 1.0 / std::max(lmax, 1e-12);

  VectorXd w = project_feasible(prob, start_point(prob, opt.start));
  double fw = quad_objective(a, w);
  double step = step0;
  int iter = 0;
  bool converged = false;

  for (; iter < opt.max_iter; ++iter) {
    const VectorXd grad = a.g * w + a.f;
    const VectorXd ref = project_feasible(prob, w - step0 * grad);
    const double pg = (w - ref).lpNorm<Eigen::Infinity>() / step0;
    if (pg <= opt.tol) {
      converged = true;
      break;
    }
    if (opt.polish && iter > 0 && iter % 250 == 0 && try_polish(prob, a, &w, &fw))
      continue;  // optimality is re-tested through pg on the next pass

    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      const VectorXd cand = project_feasible(prob, w - step * grad);
      const double lin = grad.dot(cand - w);
      const double fc = quad_objective(a, cand);
      if (lin < 0 && fc <= fw + 1e-4 * lin) {
        w = cand;
        fw = fc;
        accepted = true;
        if (bt == 0) step = std::min(step * 1.3, 1e6 * step0);
        break;
      }
      step *= 0.5;
      if (step < 1e-16 * step0) break;
    }
    if (!accepted) {
      // no descent at machine resolution: settle with a final polish
      if (opt.polish) try_polish(prob, a, &w, &fw);
      const VectorXd ref2 = project_feasible(prob, w - step0 * (a.g * w + a.f));
      converged = (w - ref2).lpNorm<Eigen::Infinity>() / step0 <= opt.tol;
      break;
    }
  }
  if (!converged && iter == opt.max_iter && opt.polish &&
      try_polish(prob, a, &w, &fw)) {
    const VectorXd ref = project_feasible(prob, w - step0 * (a.g * w + a.f));
    converged = (w - ref).lpNorm<Eigen::Infinity>() / step0 <= opt.tol;
  }

  const int m = a.m;
  const int n = a.n;
  EquilibriumSolution sol{
      prob.mu_grid().with_weights(std::vector<double>(w.data(), w.data() + m)),
      prob.nu_grid().with_weights(
          std::vector<double>(w.data() + m, w.data() + m + n))};
  sol.objective = quad_objective(a, w);
  sol.iterations = iter;
  sol.converged = converged;
  const auto res = el_residuals(prob, sol.mu_star, sol.nu_star);
  sol.el_mu_residual = res.first;
  sol.el_nu_residual = res.second;
  return sol;
}

std::pair<double, double> el_residuals(const EquilibriumProblem& prob,
                                       const GridMeasure& mu_star,
                                       const GridMeasure& nu_star) {
  const int m = mu_star.size();
  const int n = nu_star.size();
  if (m != prob.mu_grid().size() || n != prob.nu_grid().size())
    throw std::invalid_argument("el_residuals: grid mismatch");

  const MatrixXd kmu = self_kernel_matrix(mu_star);
  const MatrixXd knu = self_kernel_matrix(nu_star);
  const MatrixXd kc = cross_kernel_matrix(mu_star, nu_star);
  const VectorXd wmu = Eigen::Map<const VectorXd>(mu_star.weights().data(), m);
  const VectorXd wnu = Eigen::Map<const VectorXd>(nu_star.weights().data(), n);
  const std::vector<double> qv = prob.field_values();
  const VectorXd q = Eigen::Map<const VectorXd>(qv.data(), m);

  const VectorXd phi_mu = 2.0 * (kmu * wmu) - kc * wnu + q;
  const VectorXd phi_nu = 2.0 * (knu * wnu) - kc.transpose() * wmu;

  const double mu_thresh = 1e-10 * mu_star.mass() / m;
  double wsum = 0, lmu = 0;
  for (int i = 0; i < m; ++i)
    if (wmu[i] > mu_thresh) {
      wsum += wmu[i];
      lmu += wmu[i] * phi_mu[i];
    }
  double res_mu = 0;
  if (wsum > 0) {
    lmu /= wsum;
    for (int i = 0; i < m; ++i) {
      if (wmu[i] > mu_thresh)
        res_mu = std::max(res_mu, std::abs(phi_mu[i] - lmu));
      else
        res_mu = std::max(res_mu, std::max(0.0, lmu - phi_mu[i]));
    }
  }

  double res_nu = 0;
  if (prob.nu_mass() > 0) {
    const std::vector<double>& caps = prob.caps();
    double isum = 0, lnu = 0;
    double max_capped = -std::numeric_limits<double>::infinity();
    double min_free = std::numeric_limits<double>::infinity();
    std::vector<int> regime(n);  // 0 free, 1 interior, 2 capped
    for (int j = 0; j < n; ++j) {
      const double eps = std::max(1e-13, 1e-9 * caps[j]);
      if (wnu[j] <= eps) {
        regime[j] = 0;
        min_free = std::min(min_free, phi_nu[j]);
      } else if (wnu[j] >= caps[j] - eps) {
        regime[j] = 2;
        max_capped = std::max(max_capped, phi_nu[j]);
      } else {
        regime[j] = 1;
        isum += wnu[j];
        lnu += wnu[j] * phi_nu[j];
      }
    }
    if (isum > 0) {
      lnu /= isum;
    } else if (std::isfinite(max_capped) && std::isfinite(min_free)) {
      lnu = 0.5 * (max_capped + min_free);
    } else if (std::isfinite(max_capped)) {
      lnu = max_capped;
    } else {
      lnu = min_free;
    }
    for (int j = 0; j < n; ++j) {
      if (regime[j] == 1)
        res_nu = std::max(res_nu, std::abs(phi_nu[j] - lnu));
      else if (regime[j] == 2)
        res_nu = std::max(res_nu, std::max(0.0, phi_nu[j] - lnu));
      else
        res_nu = std::max(res_nu, std::max(0.0, lnu - phi_nu[j]));
    }
  }
  return {res_mu, res_nu};
}

EquilibriumSolution solve_with_domain_growth(double a, int mu_cells,
                                             int nu_cells,
                                             const SolveOptions& opt) {
  const double root = std::sqrt(std::max(0.0, a));
  double r = 4.0 * (1.0 + root) * (1.0 + root);
  const double s = 16.0 * std::max(1.0, a);
  EquilibriumSolution sol =
      solve(EquilibriumProblem::standard(a, mu_cells, nu_cells, r, s), opt);
  for (int doubling = 0; doubling < 4; ++doubling) {
    const GridMeasure& mu = sol.mu_star;
    double outer = 0;
    for (int i = 0; i < mu.size(); ++i)
      if (mu.left_edge(i) >= 0.95 * r) outer += mu.weight(i);
    if (outer <= 1e-4) break;
    r *= 2;
    sol = solve(EquilibriumProblem::standard(a, mu_cells, nu_cells, r, s), opt);
  }
  return sol;
}

}  // namespace vectorgas
