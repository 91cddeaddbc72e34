#include "mscale/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "mscale/estimators.hpp"
#include "mscale/limit_laws.hpp"
#include "mscale/timeline.hpp"

namespace mscale {

namespace {

// lambda_c r^2 of the planar Gilbert graph, used when graph.lambda_c is 0.
constexpr double kPlanarCriticalDegree = 1.4367;

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

void declare_run(Config& c, const std::string& sub, std::size_t replicas) {
  c.declare("run.subcommand", sub, "must match the subcommand; lets an output CSV be used as a config");
  c.declare("run.seed", "1", "64-bit master seed; replica i uses a seed derived from (seed, i)");
  if (replicas > 0) c.declare("run.replicas", std::to_string(replicas));
  c.declare("run.workers", "0", "0: MSCALE_WORKERS, else the OpenMP default");
  c.declare("run.output", "-", "CSV path, - for stdout");
}

void declare_graph(Config& c, double lambda, double radius, bool with_lambda = true) {
  c.declare("graph.dim", "2");
  c.declare("graph.radius", num(radius));
  if (with_lambda) {
    c.declare("graph.lambda", num(lambda));
    c.declare("graph.lambda_c", "0", "critical intensity used for the supercritical check; 0: 1.4367 / r^2 (d = 2)");
  }
}

void declare_mobility(Config& c) {
  c.declare("mobility.rate", "1", "jump rate");
  c.declare("mobility.law", "fixed_jump", "fixed_jump | isotropic_normalized");
  c.declare("mobility.jump", "0.05", "jump length of fixed_jump");
}

void declare_mu(Config& c) {
  const MuSetup m;
  c.declare("mu.window", num(m.window_side), "periodic window side in units of r");
  c.declare("mu.min_distance", num(m.min_distance), "in units of r");
  c.declare("mu.max_distance", num(m.max_distance), "in units of r");
  c.declare("mu.pairs", std::to_string(m.pairs));
  c.declare("mu.pairs_per_graph", std::to_string(m.pairs_per_graph));
}

void declare_limit(Config& c, bool with_statistic) {
  const LimitConfig d;
  c.declare("limit.n_S", num(d.n_S), "expected number of in-range sinks");
  c.declare("limit.L", num(d.L), "box side of the finite-range approximation");
  c.declare("limit.delta", num(d.delta), "grid step");
  c.declare("limit.M", num(d.M), "grid half-extent");
  c.declare("limit.margin", "0", "torus margin around the box; 0: automatic");
  if (with_statistic) {
    c.declare("limit.statistic", "f1", "f1 | f2 | f3");
    c.declare("limit.f2_cap", "inf", "truncation of f2");
  }
}

void declare_timeline(Config& c, bool finite_range_required) {
  c.declare("timeline.alpha", "1", "sink density exponent, lambda_S = T^-alpha");
  c.declare("timeline.n_S", "2", "expected number of in-range sinks");
  c.declare("timeline.k", "0", "hop budget; 0: resolved from n_S, alpha, T and mu");
  c.declare("timeline.mu", "0", "stretch factor; 0: estimated with the mu.* settings");
  c.declare("timeline.L", finite_range_required ? num(LimitConfig{}.L) : "", "finite-range box side; empty: exact k-hop");
  c.declare("timeline.window", "0", "periodic window side; 0: automatic");
}

WaypointLaw law_from(const Config& c) {
  const std::string& k = c.raw("mobility.law");
  if (k == "fixed_jump") return WaypointLaw::fixed_jump(c.get_double("mobility.jump"));
  if (k == "isotropic_normalized") return WaypointLaw::isotropic_normalized();
  throw ConfigError("mobility.law must be fixed_jump or isotropic_normalized, got '" + k + "'");
}

int dim_from(const Config& c) {
  const long long d = c.get_int("graph.dim");
  if (d < 1 || d > kMaxDim) throw ConfigError("graph.dim must be in [1, 4]");
  return static_cast<int>(d);
}

std::size_t replicas_from(const Config& c) {
  const long long n = c.get_int("run.replicas");
  if (n < 1) throw ConfigError("run.replicas must be positive");
  return static_cast<std::size_t>(n);
}

// Refuses percolation-dependent runs at or below the critical intensity.
void require_supercritical(const Config& c) {
  const double lambda = c.get_double("graph.lambda");
  const double r = c.get_double("graph.radius");
  double lc = c.get_double("graph.lambda_c");
  if (lc == 0.0) {
    if (dim_from(c) != 2) throw ConfigError("graph.lambda_c has no default outside d = 2; estimate it and set it");
    lc = kPlanarCriticalDegree / (r * r);
  }
  if (lambda <= lc) {
    std::ostringstream os;
    os << "graph.lambda = " << lambda << " is not above the critical intensity " << lc << " at radius " << r
       << "; this run needs a giant component. Raise graph.lambda (e.g. " << 1.05 * lc
       << ") or, with a better estimate from estimate-lambda-c, set graph.lambda_c.";
    throw ConfigError(os.str());
  }
}

LimitConfig limit_from(const Config& c, Regime regime) {
  LimitConfig lc;
  lc.regime = regime;
  lc.n_S = c.get_double("limit.n_S");
  lc.L = c.get_double("limit.L");
  lc.delta = c.get_double("limit.delta");
  lc.M = c.get_double("limit.M");
  lc.margin = c.get_double("limit.margin");
  lc.lambda = c.get_double("graph.lambda");
  lc.radius = c.get_double("graph.radius");
  lc.rate = c.get_double("mobility.rate");
  lc.law = law_from(c);
  lc.dim = dim_from(c);
  lc.replicas = replicas_from(c);
  lc.seed = c.get_u64("run.seed");
  try {
    lc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return lc;
}

Statistic statistic_from(const std::string& name, double cap) {
  if (name == "f1") return Statistic::f1();
  if (name == "f2") return Statistic::f2(cap);
  if (name == "f3") return Statistic::f3();
  throw ConfigError("statistic must be f1, f2 or f3, got '" + name + "'");
}

double mu_for(const Config& c, std::ostream& log) {
  const double given = c.get_double("timeline.mu");
  if (given > 0.0) return given;
  MuSetup m;
  m.lambda = c.get_double("graph.lambda");
  m.radius = c.get_double("graph.radius");
  m.dim = dim_from(c);
  m.window_side = c.get_double("mu.window") * m.radius;
  m.min_distance = c.get_double("mu.min_distance");
  m.max_distance = c.get_double("mu.max_distance");
  m.pairs = static_cast<std::size_t>(c.get_int("mu.pairs"));
  m.pairs_per_graph = static_cast<std::size_t>(c.get_int("mu.pairs_per_graph"));
  m.seed = derive_seed(c.get_u64("run.seed"), 0x3E57);
  const MuResult r = estimate_mu(m);
  log << "estimated mu = " << r.estimate.value << " +- " << r.estimate.std_error << '\n';
  return r.estimate.value;
}

// Piecewise-linear h from "t:v,t:v,..."; constant beyond the ends.
std::function<double(double)> tabulated_h(const std::string& text) {
  if (text.empty()) return {};
  std::vector<std::pair<double, double>> pts;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("limit.h expects t:value pairs, got '" + item + "'");
    try {
      pts.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw ConfigError("limit.h expects t:value pairs, got '" + item + "'");
    }
  }
  std::sort(pts.begin(), pts.end());
  return [pts](double t) {
    if (t <= pts.front().first) return pts.front().second;
    if (t >= pts.back().first) return pts.back().second;
    const auto hi = std::upper_bound(pts.begin(), pts.end(), std::make_pair(t, -std::numeric_limits<double>::infinity()));
    const auto lo = hi - 1;
    const double w = (t - lo->first) / (hi->first - lo->first);
    return (1.0 - w) * lo->second + w * hi->second;
  };
}

void write_header(std::ostream& out, const std::string& sub, const Config& c) {
  out << "# mscale " << sub << '\n';
  for (const auto& [k, v] : c.resolved()) out << "#@ " << k << " = " << v << '\n';
}

void result_line(std::ostream& out, const std::string& key, double value) {
  out << "# result." << key << " = " << num(value) << '\n';
}

// --- subcommands ---

void run_lambda_c(const Config& c, std::ostream& out, std::ostream& log) {
  const double r = c.get_double("graph.radius");
  const int dim = dim_from(c);
  const std::vector<double> sides = c.get_list("lambda_c.sides");
  std::vector<double> sweep = c.get_list("lambda_c.sweep");
  if (sweep.empty()) sweep = default_lambda_sweep(r, dim, static_cast<std::size_t>(c.get_int("lambda_c.points")));
  const LambdaCResult res = estimate_lambda_c(r, dim, sides, sweep, replicas_from(c), c.get_u64("run.seed"));
  result_line(out, "lambda_c", res.estimate.value);
  result_line(out, "lambda_c_std_error", res.estimate.std_error);
  out << "# result.method = " << (res.used_crossing ? "crossing" : "midpoint_mean") << '\n';
  for (const auto& cv : res.curves) {
    result_line(out, "midpoint_side_" + num(cv.side), cv.fit.mid);
    result_line(out, "midpoint_std_error_side_" + num(cv.side), cv.fit.mid_std_error);
  }
  out << "side,parameter,estimate,std_error,replicas\n";
  for (const auto& cv : res.curves)
    for (std::size_t p = 0; p < cv.intensities.size(); ++p) {
      const double q = static_cast<double>(cv.successes[p]) / static_cast<double>(cv.trials);
      out << num(cv.side) << ',' << num(cv.intensities[p]) << ',' << num(q) << ','
          << num(std::sqrt(q * (1 - q) / static_cast<double>(cv.trials))) << ',' << cv.trials << '\n';
    }
  log << "lambda_c = " << res.estimate.value << " +- " << res.estimate.std_error << '\n';
}

void run_theta(const Config& c, std::ostream& out, std::ostream& log) {
  const double lambda = c.get_double("graph.lambda");
  const double r = c.get_double("graph.radius");
  const std::vector<double> Ls = c.get_list("theta.L");
  if (Ls.empty()) throw ConfigError("theta.L must list at least one box side");
  const std::string& b = c.raw("theta.boundary");
  if (b != "periodic" && b != "open") throw ConfigError("theta.boundary must be periodic or open");
  double side = c.get_double("theta.window");
  if (side == 0.0) side = 2.0 * *std::max_element(Ls.begin(), Ls.end()) + 4.0 * r;
  const Window w{dim_from(c), side, b == "periodic" ? Boundary::periodic : Boundary::open};
  std::vector<std::pair<double, EstimateWithError>> rows;
  for (std::size_t i = 0; i < Ls.size(); ++i) {
    rows.emplace_back(Ls[i], estimate_theta(lambda, r, w, Ls[i], replicas_from(c), derive_seed(c.get_u64("run.seed"), i)));
    log << "theta_L(L=" << Ls[i] << ") = " << rows.back().second.value << " +- " << rows.back().second.std_error << '\n';
  }
  result_line(out, "window_side", side);
  write_sweep_csv(out, rows);
}

void run_mu(const Config& c, std::ostream& out, std::ostream& log) {
  require_supercritical(c);
  MuSetup m;
  m.lambda = c.get_double("graph.lambda");
  m.radius = c.get_double("graph.radius");
  m.dim = dim_from(c);
  m.window_side = c.get_double("mu.window") * m.radius;
  m.min_distance = c.get_double("mu.min_distance");
  m.max_distance = c.get_double("mu.max_distance");
  m.pairs = static_cast<std::size_t>(c.get_int("mu.pairs"));
  m.pairs_per_graph = static_cast<std::size_t>(c.get_int("mu.pairs_per_graph"));
  m.seed = c.get_u64("run.seed");
  MuResult res;
  try {
    res = estimate_mu(m);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  result_line(out, "mu", res.estimate.value);
  result_line(out, "mu_std_error", res.estimate.std_error);
  out << "# result.resampled_graphs = " << res.resampled_graphs << '\n';
  out << "distance,hops\n";
  for (const MuPair& p : res.pairs) out << num(p.distance) << ',' << p.hops << '\n';
  log << "mu = " << res.estimate.value << " +- " << res.estimate.std_error << '\n';
}

struct TimelineSetup {
  ConnectivityConfig cfg;
  ScalingParams scaling;
  Window window;
};

TimelineSetup timeline_from(const Config& c, double T, std::ostream& log) {
  TimelineSetup s;
  ConnectivityConfig& cc = s.cfg;
  cc.node_intensity = c.get_double("graph.lambda");
  cc.radius = c.get_double("graph.radius");
  cc.T = T;
  const int dim = dim_from(c);
  cc.mu = mu_for(c, log);
  s.scaling = resolve_scaling(c.get_double("timeline.n_S"), c.get_double("timeline.alpha"), T, cc.mu, dim);
  cc.sink_intensity = s.scaling.lambda_S;
  const long long k = c.get_int("timeline.k");
  cc.k = k > 0 ? static_cast<int>(k) : s.scaling.k;
  if (!c.raw("timeline.L").empty()) cc.L = c.get_double("timeline.L");
  double side = c.get_double("timeline.window");
  if (side == 0.0) {
    const double range = static_cast<double>(cc.k) / cc.mu * cc.radius;
    side = 2.0 * (range + 0.5 * cc.L.value_or(0.0) + 2.0 * cc.radius) + 4.0;
  }
  s.window = Window{dim, side, Boundary::periodic};
  return s;
}

void run_interval_measure(const Config& c, std::ostream& out, std::ostream& log) {
  require_supercritical(c);
  const double T = c.get_double("timeline.T");
  if (!(T > 0.0)) throw ConfigError("timeline.T must be positive");
  const TimelineSetup s = timeline_from(c, T, log);
  const std::string& mode_name = c.raw("timeline.mode");
  if (mode_name != "relevant_only" && mode_name != "full_recompute")
    throw ConfigError("timeline.mode must be relevant_only or full_recompute");
  const EventMode mode = mode_name == "full_recompute" ? EventMode::full_recompute : EventMode::relevant_only;
  const double rate = c.get_double("mobility.rate");
  const WaypointLaw law = law_from(c);
  const std::uint64_t seed = c.get_u64("run.seed");
  const std::size_t n = replicas_from(c);

  const auto measures = map_replicas(n, Execution::parallel, [&](std::size_t i) {
    const Scenario sc = sample_scenario(s.cfg, s.window, {0.0, T}, rate, law, derive_seed(seed, i));
    IntervalSet xi;
    if (s.cfg.L) {
      // Finite-range surrogate with the sinks in range at time 0.
      xi = compute_xi_L(sc, relevant_sinks(sc, s.cfg, 0.0), s.cfg, mode);
    } else {
      xi = compute_xi_k(sc, s.cfg, mode);
    }
    return build_measure(xi, T);
  });

  result_line(out, "lambda_S", s.scaling.lambda_S);
  result_line(out, "k", s.cfg.k);
  result_line(out, "mu", s.cfg.mu);
  result_line(out, "window_side", s.window.side);
  RunningStats f1, f2, f3;
  for (const auto& m : measures) {
    f1.add(evaluate_statistic(m, Statistic::f1()));
    f2.add(evaluate_statistic(m, Statistic::f2()));
    f3.add(evaluate_statistic(m, Statistic::f3()));
  }
  result_line(out, "tau_f1", f1.mean());
  result_line(out, "tau_f2", f2.mean());
  result_line(out, "tau_f3", f3.mean());
  out << "replica,start,end,ell,weight\n";
  for (std::size_t i = 0; i < measures.size(); ++i) write_measure_csv(out, i, measures[i]);
  log << "tau_T(f1) = " << f1.mean() << ", tau_T(f3) = " << f3.mean() << " over " << n << " replicas\n";
}

void run_limit(const Config& c, Regime regime, std::ostream& out, std::ostream& log) {
  require_supercritical(c);
  const LimitConfig lc = limit_from(c, regime);
  const Statistic f = statistic_from(c.raw("limit.statistic"), c.get_double("limit.f2_cap"));
  std::function<double(double)> h;
  if (regime == Regime::critical) {
    h = tabulated_h(c.raw("limit.h"));
    const long long steps = c.get_int("limit.steps");
    if (steps < 2) throw ConfigError("limit.steps must be at least 2");
  }
  LimitConfig run = lc;
  if (regime == Regime::critical) run.critical_steps = static_cast<std::size_t>(c.get_int("limit.steps"));
  const RegimeResult res = estimate_regime_statistic(run, f, h);

  if (regime == Regime::dense) {
    result_line(out, "mean", res.dense.value);
    result_line(out, "std_error", res.dense.std_error);
    out << "n_S,statistic,mean,std_error,replicas\n";
    out << num(lc.n_S) << ',' << f.name() << ',' << num(res.dense.value) << ',' << num(res.dense.std_error) << ','
        << res.dense.replicas << '\n';
    log << "E[" << f.name() << "] = " << res.dense.value << " +- " << res.dense.std_error << '\n';
    return;
  }
  const auto& table = regime == Regime::sparse ? res.table : res.critical.table;
  if (regime == Regime::sparse) {
    result_line(out, "mixture", res.mixture.value);
    result_line(out, "mixture_std_error", res.mixture.std_error);
    log << "Poisson mixture of conditional means = " << res.mixture.value << " +- " << res.mixture.std_error << '\n';
  } else {
    result_line(out, "mean", res.critical.mean.value);
    result_line(out, "std_error", res.critical.mean.std_error);
    log << "critical statistic mean = " << res.critical.mean.value << " +- " << res.critical.mean.std_error << '\n';
  }
  out << "n,conditional_mean,std_error,poisson_weight\n";
  for (const auto& row : table)
    out << row.n << ',' << num(row.conditional_mean) << ',' << num(row.std_error) << ',' << num(row.poisson_weight)
        << '\n';
}

void run_figure2(const Config& c, std::ostream& out, std::ostream& log) {
  require_supercritical(c);
  const LimitConfig lc = limit_from(c, Regime::dense);
  const std::vector<double> grid = c.get_list("figure2.n_S_grid");
  if (grid.empty()) throw ConfigError("figure2.n_S_grid must not be empty");
  for (double v : grid)
    if (!(v >= 0.0)) throw ConfigError("figure2.n_S_grid entries must be nonnegative");
  const std::vector<Statistic> stats{Statistic::f1(), Statistic::f2(), Statistic::f3()};
  const auto rows = figure2_sweep(lc, grid, stats);
  out << "n_S,statistic,mean,std_error,replicas\n";
  for (const auto& r : rows)
    out << num(r.n_S) << ',' << r.statistic << ',' << num(r.mean) << ',' << num(r.std_error) << ',' << r.replicas
        << '\n';
  log << "figure2: " << rows.size() << " rows\n";
}

void run_decorrelation(const Config& c, std::ostream& out, std::ostream& log) {
  require_supercritical(c);
  if (c.raw("timeline.L").empty()) throw ConfigError("decorrelation needs timeline.L");
  const std::vector<double> Ts = c.get_list("decorrelation.T");
  const double t_frac = c.get_double("decorrelation.t_frac");
  const std::size_t n = replicas_from(c);
  const std::uint64_t seed = c.get_u64("run.seed");
  out << "T,k,covariance,std_error,independent_covariance,independent_std_error,mean_first,mean_second,replicas\n";
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    if (!(Ts[i] > 0.0)) throw ConfigError("decorrelation.T entries must be positive");
    const TimelineSetup s = timeline_from(c, Ts[i], log);
    DecorrelationSetup d;
    d.cfg = s.cfg;
    d.delta = c.get_double("limit.delta");
    d.M = c.get_double("limit.M");
    d.rate = c.get_double("mobility.rate");
    d.law = law_from(c);
    d.dim = s.window.dim;
    d.window_side = c.get_double("timeline.window");
    const DecorrelationResult a = decorrelation_diagnostic(d, t_frac, n, derive_seed(seed, i, 0));
    const DecorrelationResult b = decorrelation_independent(d, t_frac, n, derive_seed(seed, i, 1));
    out << num(Ts[i]) << ',' << s.cfg.k << ',' << num(a.covariance) << ',' << num(a.std_error) << ','
        << num(b.covariance) << ',' << num(b.std_error) << ',' << num(a.mean_first) << ',' << num(a.mean_second)
        << ',' << a.replicas << '\n';
    log << "T = " << Ts[i] << ": cov = " << a.covariance << " +- " << a.std_error << '\n';
  }
}

const std::map<std::string, std::string>& flag_keys() {
  static const std::map<std::string, std::string> m{
      {"seed", "run.seed"},       {"replicas", "run.replicas"}, {"workers", "run.workers"},
      {"output", "run.output"},   {"radius", "graph.radius"},   {"lambda", "graph.lambda"},
      {"dim", "graph.dim"},       {"n-s", "limit.n_S"},         {"L", "limit.L"},
      {"delta", "limit.delta"},   {"M", "limit.M"},             {"statistic", "limit.statistic"},
      {"T", "timeline.T"},        {"mu", "timeline.mu"},        {"rate", "mobility.rate"},
  };
  return m;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"estimate-lambda-c", "estimate-mu",   "estimate-theta",
                                          "interval-measure",  "limit-dense",   "limit-sparse",
                                          "limit-critical",    "figure2",       "decorrelation"};
  return s;
}

Config default_config(const std::string& sub) {
  Config c;
  if (sub == "estimate-lambda-c") {
    declare_run(c, sub, 200);
    declare_graph(c, 0.0, 0.1, false);
    c.declare("lambda_c.sides", "3,5", "open window sides; the two largest define the crossing");
    c.declare("lambda_c.sweep", "", "intensities; empty: lambda r^2 from 1.25 to 1.65");
    c.declare("lambda_c.points", "9", "size of the default sweep");
  } else if (sub == "estimate-theta") {
    declare_run(c, sub, 1000);
    declare_graph(c, 150.0, 0.1);
    c.declare("theta.L", num(LimitConfig{}.L * 0.1), "box sides (absolute), comma-separated");
    c.declare("theta.window", "0", "window side; 0: 2 max(L) + 4 r");
    c.declare("theta.boundary", "periodic", "periodic | open");
  } else if (sub == "estimate-mu") {
    declare_run(c, sub, 0);
    declare_graph(c, 1.5, 1.0);
    declare_mu(c);
  } else if (sub == "interval-measure") {
    declare_run(c, sub, 1);
    declare_graph(c, 1.5, 1.0);
    declare_mobility(c);
    declare_timeline(c, false);
    declare_mu(c);
    c.declare("timeline.T", "100", "horizon");
    c.declare("timeline.mode", "relevant_only", "relevant_only | full_recompute");
  } else if (sub == "limit-dense" || sub == "limit-sparse" || sub == "limit-critical") {
    declare_run(c, sub, 1000);
    declare_graph(c, 1.5, 1.0);
    declare_mobility(c);
    declare_limit(c, true);
    if (sub == "limit-critical") {
      c.declare("limit.steps", "200", "Brownian time steps on [0, 1]");
      c.declare("limit.h", "", "tabulated weight t:v,t:v (linear); empty: h = 1");
    }
  } else if (sub == "figure2") {
    declare_run(c, sub, 1000);
    declare_graph(c, 1.5, 1.0);
    declare_mobility(c);
    declare_limit(c, false);
    c.declare("figure2.n_S_grid", "0,0.5,1,2,4,8");
  } else if (sub == "decorrelation") {
    declare_run(c, sub, 200);
    declare_graph(c, 1.5, 1.0);
    declare_mobility(c);
    declare_timeline(c, true);
    declare_mu(c);
    c.declare("limit.delta", num(LimitConfig{}.delta));
    c.declare("limit.M", "10");
    c.declare("decorrelation.T", "100,1000,10000");
    c.declare("decorrelation.t_frac", "0.5");
  } else {
    throw ConfigError("unknown subcommand '" + sub + "'");
  }
  return c;
}

void run_subcommand(const std::string& sub, const Config& c, std::ostream& out, std::ostream& log) {
  if (c.raw("run.subcommand") != sub)
    throw ConfigError("config was written for '" + c.raw("run.subcommand") + "', not '" + sub + "'");
  std::ostringstream body;
  try {
    if (sub == "estimate-lambda-c") run_lambda_c(c, body, log);
    else if (sub == "estimate-theta") run_theta(c, body, log);
    else if (sub == "estimate-mu") run_mu(c, body, log);
    else if (sub == "interval-measure") run_interval_measure(c, body, log);
    else if (sub == "limit-dense") run_limit(c, Regime::dense, body, log);
    else if (sub == "limit-sparse") run_limit(c, Regime::sparse, body, log);
    else if (sub == "limit-critical") run_limit(c, Regime::critical, body, log);
    else if (sub == "figure2") run_figure2(c, body, log);
    else if (sub == "decorrelation") run_decorrelation(c, body, log);
    else throw ConfigError("unknown subcommand '" + sub + "'");
  } catch (const std::length_error& e) {
    throw ConfigError(std::string("capacity: ") + e.what());
  }
  write_header(out, sub, c);
  out << body.str();
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Multi-scale connectivity Monte Carlo"};
  app.require_subcommand(1);
  struct Parsed {
    std::string config_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;
    bool list_keys = false;
  };
  std::map<std::string, Parsed> parsed;
  for (const std::string& name : subcommands()) {
    CLI::App* sc = app.add_subcommand(name);
    Parsed& p = parsed[name];
    sc->add_option("-c,--config", p.config_path, "key = value config file (an output CSV also works)");
    sc->add_option("-s,--set", p.sets, "override: key=value (repeatable)");
    sc->add_flag("--list-keys", p.list_keys, "print the accepted keys and defaults");
    const Config defaults = default_config(name);
    for (const auto& [flag, key] : flag_keys())
      if (defaults.declared(key)) sc->add_option("--" + flag, p.flags[flag], "sets " + key);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  Parsed& p = parsed[sub];
  try {
    Config c = default_config(sub);
    if (p.list_keys) {
      std::cout << c.help_text();
      return 0;
    }
    if (!p.config_path.empty()) c.load_file(p.config_path);
    for (const auto& [flag, value] : p.flags)
      if (!value.empty()) c.set(flag_keys().at(flag), value, "--" + flag);
    for (const std::string& kv : p.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      c.set(kv.substr(0, eq), kv.substr(eq + 1), "--set");
    }

    long long workers = c.get_int("run.workers");
    if (workers == 0)
      if (const char* env = std::getenv("MSCALE_WORKERS")) workers = std::atoll(env);
    if (workers < 0) throw ConfigError("run.workers must be nonnegative");
    set_worker_count(static_cast<int>(workers));

    const std::string& path = c.raw("run.output");
    if (path == "-") {
      run_subcommand(sub, c, std::cout, std::cerr);
    } else {
      std::ostringstream buf;
      run_subcommand(sub, c, buf, std::cerr);
      std::ofstream f(path);
      if (!f) throw ConfigError("cannot write output file '" + path + "'");
      f << buf.str();
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "mscale " << sub << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mscale " << sub << ": error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mscale
