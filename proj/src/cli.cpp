#include "vectorgas/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vectorgas/coulomb_gas.hpp"
#include "vectorgas/energy.hpp"
#include "vectorgas/equilibrium_solver.hpp"
#include "vectorgas/fields.hpp"
#include "vectorgas/matrix_model.hpp"
#include "vectorgas/measure_io.hpp"
#include "vectorgas/measures.hpp"
#include "vectorgas/mop_oracle.hpp"
#include "vectorgas/special_functions.hpp"

namespace vectorgas {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

int thread_budget() {
  int budget = static_cast<int>(std::thread::hardware_concurrency());
  if (budget < 1) budget = 1;
  if (const char* env = std::getenv("VECTORGAS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1)
      budget = std::min<long>(budget, v);
  }
  return budget;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open " + path.string());
  out << text;
  if (!out) throw std::invalid_argument("write failed on " + path.string());
}

// Every run leaves behind the resolved configuration it actually used.
void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& resolved) {
  fs::create_directories(out_dir);
  const json manifest{
      {"command", command}, {"version", kVersion}, {"config", resolved}};
  write_text_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
}

void write_report(const std::string& out_dir, const std::string& name,
                  const json& body) {
  fs::create_directories(out_dir);
  write_text_file(fs::path(out_dir) / name, body.dump(2) + "\n");
}

// Flat JSON object supplying defaults that the command line may override.
class Cfg {
public:
  explicit Cfg(const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    try {
      in >> obj_;
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (!obj_.is_object())
      throw std::invalid_argument("config: expected a flat JSON object");
  }

  bool has(const char* key) const { return obj_.contains(key); }

  template <typename T>
  T get(const char* key, T fallback) const {
    if (!obj_.contains(key)) return fallback;
    try {
      return obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw std::invalid_argument(std::string("config: bad value for ") + key);
    }
  }

private:
  json obj_ = json::object();
};

SphereMeasure to_sphere(const MeasureFile& m) {
  if (const auto* g = std::get_if<GridMeasure>(&m)) return stereo_push(*g);
  if (const auto* e = std::get_if<EmpiricalMeasure>(&m)) return stereo_push(*e);
  return std::get<SphereMeasure>(m);
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string field =
        text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
      throw std::invalid_argument("bad number list entry: '" + field + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

struct LogGrid {
  double lo = 0, hi = 0;
  int count = 0;
};

LogGrid parse_log_grid(const std::string& text) {
  LogGrid g;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &g.lo, &g.hi, &g.count, &tail) != 3)
    throw std::invalid_argument("grid must look like lo:hi:count");
  if (!(g.lo > 0) || !(g.hi > g.lo) || g.count < 2)
    throw std::invalid_argument("grid needs 0 < lo < hi and count >= 2");
  return g;
}

// ---------------------------------------------------------------- zeros ----

struct ZerosParams {
  double alpha = 0;
  int count = 1000;
  std::string out = ".";
};

int cmd_zeros(const ZerosParams& p) {
  const ZeroTable table(p.alpha, p.count);
  std::ostringstream csv;
  csv << "k,j_alpha_k\n";
  for (int k = 0; k < table.count(); ++k)
    csv << k << ',' << fmt17(table[k]) << '\n';
  fs::create_directories(p.out);
  write_text_file(fs::path(p.out) / "zeros.csv", csv.str());

  const double exact = 1.0 / (4.0 * (1.0 + p.alpha));
  const double sum = table.inv_square_sum();
  write_report(p.out, "zeros_report.json",
               json{{"alpha", p.alpha},
                    {"count", table.count()},
                    {"tail_offset", table.tail_offset()},
                    {"inv_square_sum", sum},
                    {"inv_square_sum_exact", exact},
                    {"inv_square_sum_abs_error", std::abs(sum - exact)}});
  write_manifest(p.out, "zeros",
                 json{{"alpha", p.alpha}, {"count", p.count}, {"out", p.out}});
  std::cout << "zeros " << table.count() << " inv_square_sum_abs_error "
            << fmt17(std::abs(sum - exact)) << "\n";
  return 0;
}

// ------------------------------------------------------------- nikishin ----

struct NikishinParams {
  double alpha = 0;
  double a = 1;
  int n = 10;
  int terms = 2000;
  std::string grid = "0.01:10:100";
  std::string out = ".";
};

int cmd_nikishin(const NikishinParams& p) {
  const ModelParams mp{p.a, p.alpha, p.n};
  mp.validate();
  if (p.terms < 1) throw std::invalid_argument("terms must be >= 1");
  const LogGrid g = parse_log_grid(p.grid);

  std::ostringstream csv;
  csv << "x,lattice_ratio,series_ratio,rel_error\n";
  double max_rel = 0;
  const double step = std::log(g.hi / g.lo) / (g.count - 1);
  for (int i = 0; i < g.count; ++i) {
    const double x = g.lo * std::exp(step * i);
    const double s = 2.0 * p.n * std::sqrt(p.a * x);
    const double lattice = ml_ratio(p.alpha, s, p.terms).value;
    const double series =
        std::exp(log_bessel_i(p.alpha + 1, s) - log_bessel_i(p.alpha, s));
    const double rel = std::abs(lattice - series) / series;
    max_rel = std::max(max_rel, rel);
    csv << fmt17(x) << ',' << fmt17(lattice) << ',' << fmt17(series) << ','
        << fmt17(rel) << '\n';
  }
  fs::create_directories(p.out);
  write_text_file(fs::path(p.out) / "nikishin.csv", csv.str());
  write_report(p.out, "nikishin_report.json",
               json{{"max_rel_error", max_rel}, {"points", g.count}});
  write_manifest(p.out, "nikishin",
                 json{{"alpha", p.alpha},
                      {"a", p.a},
                      {"n", p.n},
                      {"terms", p.terms},
                      {"grid", p.grid},
                      {"out", p.out}});
  std::cout << "max_rel_error " << fmt17(max_rel) << "\n";
  return 0;
}

// -------------------------------------------------------------- wishart ----

struct WishartParams {
  int n = 100;
  double a = 1;
  double alpha = 0;
  int samples = 1;
  std::uint64_t seed = 0;
  std::string out = ".";
};

int cmd_wishart(const WishartParams& p) {
  const ModelParams mp{p.a, p.alpha, p.n};
  mp.validate();
  if (p.samples < 1) throw std::invalid_argument("samples must be >= 1");

  std::vector<std::vector<double>> spectra(p.samples);
  const int workers = std::min(thread_budget(), p.samples);
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&]() {
      for (int k = next.fetch_add(1); k < p.samples; k = next.fetch_add(1)) {
        Prng rng(p.seed, static_cast<std::uint64_t>(k));
        spectra[k] = sample_spectrum(mp, &rng);
      }
    });
  for (auto& th : pool) th.join();

  fs::create_directories(p.out);
  std::ostringstream all;
  all << "sample_index,eigenvalue\n";
  double mean = 0, sq = 0;
  for (int k = 0; k < p.samples; ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "spectrum_%04d.csv", k);
    write_measure((fs::path(p.out) / name).string(),
                  EmpiricalMeasure(spectra[k], 1.0 / p.n));
    double trace = 0;
    for (double lam : spectra[k]) {
      all << k << ',' << fmt17(lam) << '\n';
      trace += lam;
    }
    trace /= p.n;
    mean += trace;
    sq += trace * trace;
  }
  write_text_file(fs::path(p.out) / "eigenvalues.csv", all.str());
  mean /= p.samples;
  const double var =
      p.samples > 1 ? std::max(0.0, (sq / p.samples - mean * mean)) *
                          (static_cast<double>(p.samples) / (p.samples - 1))
                    : 0.0;
  const double se = p.samples > 1 ? std::sqrt(var / p.samples) : 0.0;

  write_report(p.out, "wishart_report.json",
               json{{"samples", p.samples},
                    {"trace_moment_mean", mean},
                    {"trace_moment_se", se},
                    {"trace_moment_expected", p.a + 1.0 + p.alpha / p.n}});
  write_manifest(p.out, "wishart",
                 json{{"n", p.n},
                      {"a", p.a},
                      {"alpha", p.alpha},
                      {"samples", p.samples},
                      {"seed", p.seed},
                      {"out", p.out}});
  std::cout << "trace_moment_mean " << fmt17(mean) << " se " << fmt17(se)
            << "\n";
  return 0;
}

// ------------------------------------------------------------------ gas ----

struct GasParams {
  int n = 4;
  double a = 1;
  double alpha = 0;
  std::int64_t steps = 20000;
  std::int64_t burnin = 4000;
  std::int64_t thin = 10;
  int window = 16;
  double global_prob = 0.05;
  int lattice_count = 0;  // 0 = library default
  int chains = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string mu_file, nu_file;
  std::string out = ".";
};

int cmd_gas(const GasParams& p) {
  const ModelParams mp{p.a, p.alpha, p.n};
  mp.validate_even();

  // default initial shapes: flat mu on the confined range, sigma-shaped nu
  // held away from 0 so every quantile atom has lattice room below it
  const double root = std::sqrt(p.a);
  const double r_max = 4.0 * (1.0 + root) * (1.0 + root);
  const double s_max = 16.0 * std::max(1.0, p.a);
  GridMeasure mu = GridMeasure::uniform(0.0, r_max, 128, 1.0);
  GridMeasure nu = [&]() {
    GridMeasure cells = GridMeasure::uniform(-s_max, -s_max / 1000.0, 128, 0.0);
    const ConstraintMeasure sigma(p.a);
    std::vector<double> w(cells.size());
    double total = 0;
    for (int j = 0; j < cells.size(); ++j) {
      w[j] = sigma.interval_mass(cells.left_edge(j), cells.right_edge(j));
      total += w[j];
    }
    for (double& v : w) v *= 0.5 / total;
    return cells.with_weights(w);
  }();
  if (!p.mu_file.empty()) {
    MeasureFile f = read_measure(p.mu_file);
    const auto* g = std::get_if<GridMeasure>(&f);
    if (!g) throw std::invalid_argument("gas: --mu must be a grid measure");
    mu = *g;
  }
  if (!p.nu_file.empty()) {
    MeasureFile f = read_measure(p.nu_file);
    const auto* g = std::get_if<GridMeasure>(&f);
    if (!g) throw std::invalid_argument("gas: --nu must be a grid measure");
    nu = *g;
  }

  std::shared_ptr<const Lattice> lattice;
  if (p.lattice_count > 0) lattice = std::make_shared<Lattice>(mp, p.lattice_count);
  const ParticleConfig init = init_config(mu, nu, mp, lattice);

  if (p.chains < 1) throw std::invalid_argument("gas: chains must be >= 1");
  std::vector<GasRun> runs(p.chains);
  const int workers = std::min(thread_budget(), p.chains);
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&]() {
      for (int c = next.fetch_add(1); c < p.chains; c = next.fetch_add(1)) {
        RunOptions ro;
        ro.steps = p.steps;
        ro.burnin = p.burnin;
        ro.thin = p.thin;
        ro.window = p.window;
        ro.global_prob = p.global_prob;
        ro.seed = p.seed;
        ro.stream = p.stream + static_cast<std::uint64_t>(c);
        runs[c] = mcmc_run(init, ro);
      }
    });
  for (auto& th : pool) th.join();

  std::ostringstream csv;
  csv << "chain,step,kind,value\n";
  for (int c = 0; c < p.chains; ++c)
    for (const GasSample& s : runs[c].samples) {
      for (double x : s.x)
        csv << c << ',' << s.step << ",x," << fmt17(x) << '\n';
      for (double u : s.u_values)
        csv << c << ',' << s.step << ",u," << fmt17(u) << '\n';
    }
  fs::create_directories(p.out);
  write_text_file(fs::path(p.out) / "chain.csv", csv.str());
  write_measure((fs::path(p.out) / "x_last.csv").string(),
                EmpiricalMeasure(runs[0].last.x, 1.0 / p.n));

  json chain_stats = json::array();
  double ax = 0, au = 0;
  for (int c = 0; c < p.chains; ++c) {
    const ChainStats& st = runs[c].stats;
    const double cx = st.proposed_x ? double(st.accepted_x) / st.proposed_x : 0;
    const double cu = st.proposed_u ? double(st.accepted_u) / st.proposed_u : 0;
    ax += cx / p.chains;
    au += cu / p.chains;
    chain_stats.push_back(json{{"chain", c},
                               {"sweeps", st.steps},
                               {"x_acceptance", cx},
                               {"u_acceptance", cu},
                               {"proposal_width", st.proposal_width},
                               {"top_decile_visits", st.top_decile_visits},
                               {"max_drift", st.max_drift},
                               {"kept_samples", runs[c].samples.size()}});
  }
  write_report(p.out, "gas_report.json",
               json{{"chains", chain_stats},
                    {"x_acceptance", ax},
                    {"u_acceptance", au},
                    {"snap_shifts", init.snap_shifts}});
  write_manifest(p.out, "gas",
                 json{{"n", p.n},
                      {"a", p.a},
                      {"alpha", p.alpha},
                      {"steps", p.steps},
                      {"burnin", p.burnin},
                      {"thin", p.thin},
                      {"window", p.window},
                      {"global_prob", p.global_prob},
                      {"lattice_count", p.lattice_count},
                      {"chains", p.chains},
                      {"seed", p.seed},
                      {"stream", p.stream},
                      {"mu", p.mu_file},
                      {"nu", p.nu_file},
                      {"out", p.out}});
  std::cout << "x_acceptance " << fmt17(ax) << " u_acceptance " << fmt17(au)
            << " kept " << runs[0].samples.size() * p.chains << "\n";
  return 0;
}

// --------------------------------------------------------------- oracle ----

struct OracleParams {
  int n = 2;
  double a = 1;
  double alpha = 0;
  int terms = 20000;
  int points = 200;
  std::uint64_t seed = 0;
  std::string x;  // explicit tuple instead of random points
  std::string out = ".";
};

// one row of the ratio table at an ordered tuple
json oracle_row(const ModelParams& mp, const std::vector<double>& xs, int terms) {
  const double mop = mop_density(mp, xs);
  const OracleEval gas = gas_marginal_density(mp, xs, terms);
  json row{{"x", xs},
           {"mop_density", mop},
           {"gas_marginal", gas.value},
           {"gas_tail_bound", gas.truncation_bound}};
  if (mop > 0) row["ratio"] = gas.value / mop;
  return row;
}

int cmd_oracle(const OracleParams& p) {
  const ModelParams mp{p.a, p.alpha, p.n};
  mp.validate_even();

  json report;
  if (!p.x.empty()) {
    report = oracle_row(mp, parse_number_list(p.x), p.terms);
  } else {
    if (p.points < 2) throw std::invalid_argument("oracle: points must be >= 2");
    Prng rng(p.seed);
    json rows = json::array();
    std::ostringstream csv;
    for (int i = 0; i < p.n; ++i) csv << 'x' << i << ',';
    csv << "mop_density,gas_marginal,ratio\n";
    double sum = 0, sq = 0;
    for (int r = 0; r < p.points; ++r) {
      std::vector<double> xs(p.n);
      for (double& x : xs) x = 0.05 + 5.95 * rng.uniform();
      std::sort(xs.begin(), xs.end());
      const json row = oracle_row(mp, xs, p.terms);
      const double ratio = row.value("ratio", 0.0);
      sum += ratio;
      sq += ratio * ratio;
      rows.push_back(row);
      for (double x : xs) csv << fmt17(x) << ',';
      csv << fmt17(row["mop_density"].get<double>()) << ','
          << fmt17(row["gas_marginal"].get<double>()) << ',' << fmt17(ratio)
          << '\n';
    }
    const double mean = sum / p.points;
    const double var = std::max(0.0, sq / p.points - mean * mean);
    const double cv = mean != 0 ? std::sqrt(var) / std::abs(mean) : 0.0;
    fs::create_directories(p.out);
    write_text_file(fs::path(p.out) / "oracle.csv", csv.str());
    report = json{{"points", p.points},
                  {"ratio_mean", mean},
                  {"ratio_cv", cv},
                  {"rows", rows}};
  }
  write_report(p.out, "oracle_report.json", report);
  write_manifest(p.out, "oracle",
                 json{{"n", p.n},
                      {"a", p.a},
                      {"alpha", p.alpha},
                      {"terms", p.terms},
                      {"points", p.points},
                      {"seed", p.seed},
                      {"x", p.x},
                      {"out", p.out}});
  if (p.x.empty())
    std::cout << "ratio_cv " << fmt17(report["ratio_cv"].get<double>()) << "\n";
  else
    std::cout << report.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------- equilibrium ----

struct EquilibriumParams {
  double a = 1;
  int mu_cells = 400;
  int nu_cells = 400;
  double tol = 1e-7;
  int max_iter = 200000;
  int start = 0;
  double r = 0;  // 0 = auto
  double s = 0;
  bool growth = false;
  bool single = false;
  std::string out = ".";
};

int cmd_equilibrium(const EquilibriumParams& p) {
  SolveOptions so;
  so.tol = p.tol;
  so.max_iter = p.max_iter;
  so.start = p.start;

  EquilibriumSolution sol = [&]() {
    if (p.growth) return solve_with_domain_growth(p.a, p.mu_cells, p.nu_cells, so);
    if (p.single) {
      const double root = std::sqrt(std::max(0.0, p.a));
      const double r = p.r > 0 ? p.r : 4.0 * (1.0 + root) * (1.0 + root);
      return solve(EquilibriumProblem::single(p.a, p.mu_cells, r), so);
    }
    if (p.r > 0 && p.s > 0)
      return solve(EquilibriumProblem::standard(p.a, p.mu_cells, p.nu_cells,
                                                p.r, p.s),
                   so);
    return solve(EquilibriumProblem::standard(p.a, p.mu_cells, p.nu_cells), so);
  }();

  fs::create_directories(p.out);
  write_measure((fs::path(p.out) / "mu_star.csv").string(), sol.mu_star);
  write_measure((fs::path(p.out) / "nu_star.csv").string(), sol.nu_star);

  double first_moment = 0;
  for (int i = 0; i < sol.mu_star.size(); ++i)
    first_moment += sol.mu_star.point(i) * sol.mu_star.weight(i);
  write_report(p.out, "equilibrium_report.json",
               json{{"objective", sol.objective},
                    {"el_mu_residual", sol.el_mu_residual},
                    {"el_nu_residual", sol.el_nu_residual},
                    {"iterations", sol.iterations},
                    {"converged", sol.converged},
                    {"mu_mass", sol.mu_star.mass()},
                    {"nu_mass", sol.nu_star.mass()},
                    {"mu_first_moment", first_moment}});
  write_manifest(p.out, "equilibrium",
                 json{{"a", p.a},
                      {"grid_mu", p.mu_cells},
                      {"grid_nu", p.nu_cells},
                      {"tol", p.tol},
                      {"max_iter", p.max_iter},
                      {"start", p.start},
                      {"r", p.r},
                      {"s", p.s},
                      {"growth", p.growth},
                      {"single", p.single},
                      {"out", p.out}});
  std::cout << "objective " << fmt17(sol.objective) << " mu_first_moment "
            << fmt17(first_moment) << " converged "
            << (sol.converged ? "yes" : "no") << "\n";
  if (!sol.converged) {
    std::cerr << "equilibrium: projected gradient tolerance not reached\n";
    return 3;
  }
  return 0;
}

// ----------------------------------------------------------------- rate ----

struct RateParams {
  double a = 1;
  std::string mu_file, nu_file;
  bool sphere = false;
  std::string out = ".";
};

int cmd_rate(const RateParams& p) {
  const MeasureFile mu = read_measure(p.mu_file);
  EnergyReport rep;
  if (p.sphere) {
    if (p.nu_file.empty())
      throw std::invalid_argument("rate: --sphere needs both --mu and --nu");
    rep = rate_sphere(to_sphere(mu), to_sphere(read_measure(p.nu_file)), p.a);
  } else {
    const auto* mu_g = std::get_if<GridMeasure>(&mu);
    if (!mu_g)
      throw std::invalid_argument("rate: line evaluation needs grid measures");
    if (p.nu_file.empty()) {
      rep = rate_line(*mu_g, p.a);
    } else {
      const MeasureFile nu = read_measure(p.nu_file);
      const auto* nu_g = std::get_if<GridMeasure>(&nu);
      if (!nu_g)
        throw std::invalid_argument("rate: line evaluation needs grid measures");
      rep = rate_line(*mu_g, *nu_g, p.a);
    }
  }
  const json report{{"self_mu", rep.self_mu},
                    {"self_nu", rep.self_nu},
                    {"cross", rep.cross},
                    {"field_term", rep.field_term},
                    {"total", rep.total}};
  write_report(p.out, "rate_report.json", report);
  write_manifest(p.out, "rate",
                 json{{"a", p.a},
                      {"mu", p.mu_file},
                      {"nu", p.nu_file},
                      {"sphere", p.sphere},
                      {"out", p.out}});
  std::cout << report.dump(2) << "\n";
  return 0;
}

// -------------------------------------------------------------- compare ----

struct CompareParams {
  std::string empirical, reference;
  std::string out = ".";
};

int cmd_compare(const CompareParams& p) {
  const double d = bl_distance(to_sphere(read_measure(p.empirical)),
                               to_sphere(read_measure(p.reference)));
  write_report(p.out, "compare_report.json", json{{"bl_distance", d}});
  write_manifest(p.out, "compare",
                 json{{"empirical", p.empirical},
                      {"reference", p.reference},
                      {"out", p.out}});
  std::cout << "bl_distance " << fmt17(d) << "\n";
  return 0;
}

}  // namespace

int run_command(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);

  // --config is resolved before CLI11 so its values become the defaults the
  // remaining flags are parsed against (command line wins)
  std::string config_path;
  for (auto it = args.begin(); it != args.end();) {
    if (*it == "--config") {
      if (std::next(it) == args.end()) {
        std::cerr << "--config requires a file argument\n";
        return 1;
      }
      config_path = *std::next(it);
      it = args.erase(it, std::next(it, 2));
    } else if (it->rfind("--config=", 0) == 0) {
      config_path = it->substr(9);
      it = args.erase(it);
    } else {
      ++it;
    }
  }

  try {
    const Cfg cfg(config_path);

    CLI::App app{"two-type Coulomb gas and constrained equilibrium toolkit"};
    app.require_subcommand(0, 1);
    std::string config_echo;
    app.add_option("--config", config_echo,
                   "flat JSON object overriding flag defaults");

    ZerosParams zp;
    zp.alpha = cfg.get("alpha", zp.alpha);
    zp.count = cfg.get("count", zp.count);
    zp.out = cfg.get("out", zp.out);
    CLI::App* zeros = app.add_subcommand("zeros", "Bessel zero table and checks");
    zeros->add_option("--alpha", zp.alpha, "Bessel order alpha >= 0");
    zeros->add_option("--count", zp.count, "number of zeros");
    zeros->add_option("--out", zp.out, "output directory");

    NikishinParams np;
    np.alpha = cfg.get("alpha", np.alpha);
    np.a = cfg.get("a", np.a);
    np.n = cfg.get("n", np.n);
    np.terms = cfg.get("terms", np.terms);
    np.grid = cfg.get("grid", np.grid);
    np.out = cfg.get("out", np.out);
    CLI::App* nikishin =
        app.add_subcommand("nikishin", "lattice-sum vs series weight ratio");
    nikishin->add_option("--alpha", np.alpha, "Bessel order alpha >= 0");
    nikishin->add_option("--a", np.a, "shift parameter a > 0");
    nikishin->add_option("--n", np.n, "matrix size n");
    nikishin->add_option("--terms", np.terms, "lattice terms");
    nikishin->add_option("--grid", np.grid, "log grid lo:hi:count");
    nikishin->add_option("--out", np.out, "output directory");

    WishartParams wp;
    wp.n = cfg.get("n", wp.n);
    wp.a = cfg.get("a", wp.a);
    wp.alpha = cfg.get("alpha", wp.alpha);
    wp.samples = cfg.get("samples", wp.samples);
    wp.seed = cfg.get("seed", wp.seed);
    wp.out = cfg.get("out", wp.out);
    CLI::App* wishart =
        app.add_subcommand("wishart", "sample matrix spectra");
    wishart->add_option("--n", wp.n, "matrix size n");
    wishart->add_option("--a", wp.a, "shift parameter a > 0");
    wishart->add_option("--alpha", wp.alpha, "rectangularity alpha");
    wishart->add_option("--samples", wp.samples, "number of samples");
    CLI::Option* wseed = wishart->add_option("--seed", wp.seed, "PRNG seed");
    wishart->add_option("--out", wp.out, "output directory");

    GasParams gp;
    gp.n = cfg.get("n", gp.n);
    gp.a = cfg.get("a", gp.a);
    gp.alpha = cfg.get("alpha", gp.alpha);
    gp.steps = cfg.get("steps", gp.steps);
    gp.burnin = cfg.get("burnin", gp.burnin);
    gp.thin = cfg.get("thin", gp.thin);
    gp.window = cfg.get("window", gp.window);
    gp.global_prob = cfg.get("global_prob", gp.global_prob);
    gp.lattice_count = cfg.get("lattice_count", gp.lattice_count);
    gp.chains = cfg.get("chains", gp.chains);
    gp.seed = cfg.get("seed", gp.seed);
    gp.stream = cfg.get("stream", gp.stream);
    gp.mu_file = cfg.get("mu", gp.mu_file);
    gp.nu_file = cfg.get("nu", gp.nu_file);
    gp.out = cfg.get("out", gp.out);
    CLI::App* gas = app.add_subcommand("gas", "two-type gas MCMC chain");
    gas->add_option("--n", gp.n, "positive particles (even)");
    gas->add_option("--a", gp.a, "shift parameter a > 0");
    gas->add_option("--alpha", gp.alpha, "rectangularity alpha");
    gas->add_option("--steps", gp.steps, "post-burnin sweeps");
    gas->add_option("--burnin", gp.burnin, "burn-in sweeps");
    gas->add_option("--thin", gp.thin, "keep every thin-th sweep");
    gas->add_option("--window", gp.window, "u-proposal window (indices)");
    gas->add_option("--global-prob", gp.global_prob,
                    "table-wide u-proposal probability");
    gas->add_option("--lattice-count", gp.lattice_count,
                    "lattice size (0 = default)");
    gas->add_option("--chains", gp.chains, "independent chains");
    CLI::Option* gseed = gas->add_option("--seed", gp.seed, "PRNG seed");
    gas->add_option("--stream", gp.stream, "PRNG stream id");
    gas->add_option("--mu", gp.mu_file, "initial mu grid measure file");
    gas->add_option("--nu", gp.nu_file, "initial nu grid measure file");
    gas->add_option("--out", gp.out, "output directory");

    OracleParams op;
    op.n = cfg.get("n", op.n);
    op.a = cfg.get("a", op.a);
    op.alpha = cfg.get("alpha", op.alpha);
    op.terms = cfg.get("terms", op.terms);
    op.points = cfg.get("points", op.points);
    op.seed = cfg.get("seed", op.seed);
    op.x = cfg.get("x", op.x);
    op.out = cfg.get("out", op.out);
    CLI::App* oracle =
        app.add_subcommand("oracle", "small-n joint density ratio table");
    oracle->add_option("--n", op.n, "particle count (2 or 4)");
    oracle->add_option("--a", op.a, "shift parameter a > 0");
    oracle->add_option("--alpha", op.alpha, "rectangularity alpha");
    oracle->add_option("--terms", op.terms, "lattice terms for the marginal");
    oracle->add_option("--points", op.points, "random evaluation tuples");
    CLI::Option* oseed = oracle->add_option("--seed", op.seed, "PRNG seed");
    CLI::Option* ox =
        oracle->add_option("--x", op.x, "explicit ordered tuple x1,x2,...");
    oracle->add_option("--out", op.out, "output directory");

    EquilibriumParams ep;
    ep.a = cfg.get("a", ep.a);
    ep.mu_cells = cfg.get("grid_mu", ep.mu_cells);
    ep.nu_cells = cfg.get("grid_nu", ep.nu_cells);
    ep.tol = cfg.get("tol", ep.tol);
    ep.max_iter = cfg.get("max_iter", ep.max_iter);
    ep.start = cfg.get("start", ep.start);
    ep.r = cfg.get("r", ep.r);
    ep.s = cfg.get("s", ep.s);
    ep.growth = cfg.get("growth", ep.growth);
    ep.single = cfg.get("single", ep.single);
    ep.out = cfg.get("out", ep.out);
    CLI::App* equilibrium =
        app.add_subcommand("equilibrium", "constrained equilibrium solve");
    equilibrium->add_option("--a", ep.a, "shift parameter a >= 0");
    equilibrium->add_option("--grid-mu", ep.mu_cells, "mu grid cells");
    equilibrium->add_option("--grid-nu", ep.nu_cells, "nu grid cells");
    equilibrium->add_option("--tol", ep.tol, "projected-gradient tolerance");
    equilibrium->add_option("--max-iter", ep.max_iter, "iteration cap");
    equilibrium->add_option("--start", ep.start, "start point (0 or 1)");
    equilibrium->add_option("--r", ep.r, "mu domain bound (0 = auto)");
    equilibrium->add_option("--s", ep.s, "nu domain bound (0 = auto)");
    equilibrium->add_flag("--growth", ep.growth, "double r until mass stays put");
    equilibrium->add_flag("--single", ep.single, "single-measure reduction");
    equilibrium->add_option("--out", ep.out, "output directory");

    RateParams rp;
    rp.a = cfg.get("a", rp.a);
    rp.mu_file = cfg.get("mu", rp.mu_file);
    rp.nu_file = cfg.get("nu", rp.nu_file);
    rp.sphere = cfg.get("sphere", rp.sphere);
    rp.out = cfg.get("out", rp.out);
    CLI::App* rate = app.add_subcommand("rate", "rate functional of measures");
    rate->add_option("--a", rp.a, "shift parameter a > 0");
    CLI::Option* rmu = rate->add_option("--mu", rp.mu_file, "mu measure file");
    rate->add_option("--nu", rp.nu_file, "nu measure file");
    rate->add_flag("--sphere", rp.sphere, "evaluate on the sphere");
    rate->add_option("--out", rp.out, "output directory");

    CompareParams cp;
    cp.empirical = cfg.get("empirical", cp.empirical);
    cp.reference = cfg.get("reference", cp.reference);
    cp.out = cfg.get("out", cp.out);
    CLI::App* compare =
        app.add_subcommand("compare", "BL distance between two measures");
    CLI::Option* cemp =
        compare->add_option("--empirical", cp.empirical, "measure file");
    CLI::Option* cref =
        compare->add_option("--reference", cp.reference, "measure file");
    compare->add_option("--out", cp.out, "output directory");

    try {
      std::reverse(args.begin(), args.end());
      app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 1;
    }

    // seeds are mandatory for the stochastic commands; a config value counts
    if (wishart->parsed() && wseed->count() == 0 && !cfg.has("seed")) {
      std::cerr << "wishart: --seed is required\n";
      return 1;
    }
    if (gas->parsed() && gseed->count() == 0 && !cfg.has("seed")) {
      std::cerr << "gas: --seed is required\n";
      return 1;
    }
    // random-tuple mode is stochastic; an explicit --x tuple is not
    if (oracle->parsed() && ox->count() == 0 && !cfg.has("x") &&
        oseed->count() == 0 && !cfg.has("seed")) {
      std::cerr << "oracle: --seed is required (or give --x)\n";
      return 1;
    }
    if (rate->parsed() && rmu->count() == 0 && !cfg.has("mu")) {
      std::cerr << "rate: --mu is required\n";
      return 1;
    }
    if (compare->parsed() &&
        ((cemp->count() == 0 && !cfg.has("empirical")) ||
         (cref->count() == 0 && !cfg.has("reference")))) {
      std::cerr << "compare: --empirical and --reference are required\n";
      return 1;
    }

    if (zeros->parsed()) return cmd_zeros(zp);
    if (nikishin->parsed()) return cmd_nikishin(np);
    if (wishart->parsed()) return cmd_wishart(wp);
    if (gas->parsed()) return cmd_gas(gp);
    if (oracle->parsed()) return cmd_oracle(op);
    if (equilibrium->parsed()) return cmd_equilibrium(ep);
    if (rate->parsed()) return cmd_rate(rp);
    if (compare->parsed()) return cmd_compare(cp);

    std::cerr << app.help();
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace vectorgas
