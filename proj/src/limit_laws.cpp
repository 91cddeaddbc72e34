#include "mscale/limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mscale/graph.hpp"

namespace mscale {

namespace {

constexpr std::uint64_t kCountStream = 0xC0FFEE;
constexpr std::uint64_t kTableStream = 0x7AB1E;
constexpr std::uint64_t kCriticalStream = 0xB0A7;

double auto_margin(const LimitConfig& cfg) {
  // A radius so no edge wraps around the box, plus three standard deviations
  // of one coordinate's displacement over the grid half-extent: a node has to
  // cross the 2 * margin gap before it can re-enter through the far face.
  const double spread = std::sqrt(cfg.rate * cfg.M * cfg.law.mean_square_norm(cfg.dim) / cfg.dim);
  return cfg.radius + 3.0 * spread;
}

Point torus_center(const Window& w) {
  Point c(w.dim);
  for (int k = 0; k < w.dim; ++k) c[k] = 0.5 * w.side;
  return c;
}

// One dynamic ensemble plus the point whose L-box is tested: either a moving
// typical node or the fixed torus center. The fast kernel streams node
// positions outward from time 0 (queries on each side of 0 must move away
// from it) and evaluates on the local box graph; the reference kernel keeps
// full traces and rebuilds the torus graph.
class BoxProcess {
 public:
  BoxProcess(const LimitConfig& cfg, std::uint64_t seed, bool moving, Kernel kernel)
      : cfg_(cfg), kernel_(kernel), torus_(cfg.torus()), center_(torus_center(torus_)) {
    const std::uint64_t ens_seed = derive_seed(seed, 0);
    if (kernel == Kernel::reference) {
      const TimeGrid g = cfg.grid();
      const Horizon h{g.at(0), g.at(g.size() - 1)};
      ensemble_.emplace(sample_ensemble(cfg.lambda, torus_, h, cfg.rate, cfg.law, ens_seed));
      if (moving) mover_trace_.emplace(simulate_trace(center_, h, cfg.rate, cfg.law, derive_seed(seed, 1)));
      return;
    }
    // Same seeds as sample_ensemble / MobileEnsemble.
    const PointSet initial = sample_ppp(cfg.lambda, torus_, derive_seed(ens_seed, 0));
    const std::uint64_t trace_seed = derive_seed(ens_seed, 1);
    walkers_.reserve(initial.size());
    for (std::size_t i = 0; i < initial.size(); ++i)
      walkers_.emplace_back(initial[i], cfg.rate, cfg.law, derive_seed(trace_seed, i));
    if (moving) mover_.emplace(center_, cfg.rate, cfg.law, derive_seed(seed, 1));
  }

  bool member(double s) { return kernel_ == Kernel::fast ? member_fast(s) : member_reference(s); }

 private:
  bool member_fast(double s) {
    const Point x = mover_ ? wrap(torus_, mover_->position_at(s)) : center_;
    const double half = 0.5 * cfg_.L;
    PointSet box(Window{cfg_.dim, cfg_.L, Boundary::open}, cfg_.lambda);
    for (TraceWalker& w : walkers_) {
      const Point p = wrap(torus_, w.position_at(s));
      if (sup_distance(torus_, x, p) > half) continue;
      Point q = displacement(torus_, x, p);
      for (int k = 0; k < cfg_.dim; ++k) q[k] = std::clamp(q[k] + half, 0.0, cfg_.L);
      box.push_back(q);
    }
    if (box.empty()) return false;
    const GridIndex idx(box, cfg_.radius);
    Point c(cfg_.dim);
    for (int k = 0; k < cfg_.dim; ++k) c[k] = half;
    return percolates_beyond(box, idx, cfg_.radius, c, cfg_.L, ws_);
  }

  bool member_reference(double s) {
    const Point x = mover_trace_ ? wrap(torus_, mover_trace_->position_at(s)) : center_;
    if (ensemble_->size() == 0) return false;
    const SpatialGraph g(ensemble_->positions_at(s), cfg_.radius);
    return percolates_beyond(g, x, cfg_.L);
  }

  const LimitConfig& cfg_;
  Kernel kernel_;
  Window torus_;
  Point center_;
  std::vector<TraceWalker> walkers_;
  std::optional<TraceWalker> mover_;
  std::optional<MobileEnsemble> ensemble_;
  std::optional<NodeTrace> mover_trace_;
  BfsWorkspace ws_;
};

// Evaluation order for walkers: center, then outward to the left, then
// outward to the right.
template <class F>
void outward(std::size_t lo, std::size_t center, std::size_t hi, F&& f) {
  for (std::size_t i = center + 1; i-- > lo;) f(i);
  for (std::size_t i = center + 1; i <= hi; ++i) f(i);
}

GridMask full_mask(BoxProcess& proc, const TimeGrid& grid) {
  GridMask m(grid.size(), 0);
  outward(0, grid.center_index(), grid.size() - 1, [&](std::size_t i) { m[i] = proc.member(grid.at(i)) ? 1 : 0; });
  return m;
}

double simpson_over_unit(const std::function<double(double)>& g) {
  constexpr int kPanels = 64;
  const double h = 1.0 / kPanels;
  double s = g(0.0) + g(1.0);
  for (int i = 1; i < kPanels; ++i) s += (i % 2 ? 4.0 : 2.0) * g(i * h);
  return s * h / 3.0;
}

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::dense: return "dense";
    case Regime::sparse: return "sparse";
    case Regime::critical: return "critical";
  }
  return "?";
}

Window LimitConfig::torus() const {
  const double m = margin > 0.0 ? margin : auto_margin(*this);
  return Window{dim, L + 2.0 * m, Boundary::periodic};
}

void LimitConfig::validate() const {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be in [1, 4]");
  if (!(n_S >= 0.0) || !std::isfinite(n_S)) throw std::invalid_argument("n_S must be nonnegative");
  if (!(L > 0.0) || !(delta > 0.0) || !(M > 0.0)) throw std::invalid_argument("L, delta and M must be positive");
  if (delta > M) throw std::invalid_argument("delta must not exceed M");
  if (!(lambda >= 0.0) || !(radius > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("need lambda >= 0, radius > 0 and rate > 0");
  if (radius >= L / 2.0) throw std::invalid_argument("radius must be smaller than L / 2");
  if (margin != 0.0 && !(margin > radius / 2.0))
    throw std::invalid_argument("torus margin must exceed radius / 2 so no edge wraps around the box");
  if (replicas == 0) throw std::invalid_argument("replicas must be positive");
}

GridMask sample_xi_typical(const LimitConfig& cfg, std::size_t replica, Kernel kernel) {
  cfg.validate();
  BoxProcess proc(cfg, derive_seed(cfg.seed, replica, 0), true, kernel);
  return full_mask(proc, cfg.grid());
}

GridMask sample_xi_static(const LimitConfig& cfg, std::size_t replica, std::size_t j, Kernel kernel) {
  cfg.validate();
  if (j == 0) throw std::invalid_argument("static copies are numbered from 1");
  BoxProcess proc(cfg, derive_seed(cfg.seed, replica, j), false, kernel);
  return full_mask(proc, cfg.grid());
}

long long coupled_sink_count(const LimitConfig& cfg, std::size_t replica, double n_S) {
  if (!(n_S > 0.0)) return 0;
  Engine eng = make_engine(derive_seed(cfg.seed, replica, kCountStream));
  return poisson_quantile(n_S, uniform01(eng));
}

std::vector<double> draw_I_o_ladder(const LimitConfig& cfg, std::size_t replica, long long max_N) {
  cfg.validate();
  if (max_N < 0) throw std::invalid_argument("sink count must be nonnegative");
  const TimeGrid grid = cfg.grid();
  std::vector<double> ell(static_cast<std::size_t>(max_N) + 1, 0.0);
  if (max_N == 0) return ell;

  // Run of the typical node's membership around the center; only that run
  // can contribute to the discretized length.
  std::size_t lo = grid.center_index(), hi = lo;
  {
    BoxProcess typical(cfg, derive_seed(cfg.seed, replica, 0), true, Kernel::fast);
    if (!typical.member(grid.at(lo))) return ell;
    while (lo > 0 && typical.member(grid.at(lo - 1))) --lo;
    while (hi + 1 < grid.size() && typical.member(grid.at(hi + 1))) ++hi;
  }

  GridMask joint(grid.size(), 0);
  std::size_t covered = 0;
  const std::size_t run = hi - lo + 1;
  for (long long j = 1; j <= max_N; ++j) {
    if (covered < run) {
      BoxProcess copy(cfg, derive_seed(cfg.seed, replica, static_cast<std::uint64_t>(j)), false, Kernel::fast);
      outward(lo, grid.center_index(), hi, [&](std::size_t i) {
        if (!joint[i] && copy.member(grid.at(i))) {
          joint[i] = 1;
          ++covered;
        }
      });
    }
    ell[static_cast<std::size_t>(j)] = discretized_length(joint, grid);
  }
  return ell;
}

LimitSample draw_I_o_given(const LimitConfig& cfg, std::size_t replica, long long N) {
  return {draw_I_o_ladder(cfg, replica, N).back(), N};
}

LimitSample draw_I_o(const LimitConfig& cfg, std::size_t replica) {
  return draw_I_o_given(cfg, replica, coupled_sink_count(cfg, replica, cfg.n_S));
}

double limit_value(const Statistic& f, double ell, double t) {
  if (!(ell > 0.0)) return 0.0;
  return f(ell, t);
}

namespace {

// f integrated against dt on [0, 1]; time-independent f needs no quadrature.
double time_integrated(const Statistic& f, double ell) {
  if (!(ell > 0.0)) return 0.0;
  if (!f.time_dependent()) return f(ell, 0.0);
  return simpson_over_unit([&](double t) { return f(ell, t); });
}

std::vector<ConditionalRow> rows_from_ladders(const std::vector<std::vector<double>>& values, double n_S) {
  const std::size_t width = values.empty() ? 0 : values.front().size();
  std::vector<ConditionalRow> rows(width);
  for (std::size_t n = 0; n < width; ++n) {
    RunningStats acc;
    for (const auto& v : values) acc.add(v[n]);
    rows[n] = {static_cast<long long>(n), acc.mean(), acc.std_error(), poisson_pmf(n_S, static_cast<long long>(n))};
  }
  return rows;
}

std::vector<std::vector<double>> table_values(const LimitConfig& cfg, const Statistic& f, long long max_n,
                                              Execution exec) {
  LimitConfig tc = cfg;
  tc.seed = derive_seed(cfg.seed, kTableStream);
  return map_replicas(cfg.replicas, exec, [&](std::size_t i) {
    std::vector<double> v = draw_I_o_ladder(tc, i, max_n);
    for (double& x : v) x = time_integrated(f, x);
    return v;
  });
}

}  // namespace

long long poisson_table_limit(double n_S, double tail) {
  if (!(n_S > 0.0)) return 0;
  long long n = 0;
  while (1.0 - poisson_cdf(n_S, n) >= tail) ++n;
  return n;
}

std::vector<ConditionalRow> conditional_table(const LimitConfig& cfg, const Statistic& f, long long max_n,
                                              Execution exec) {
  return rows_from_ladders(table_values(cfg, f, max_n, exec), cfg.n_S);
}

RegimeResult estimate_regime_statistic(const LimitConfig& cfg, const Statistic& f,
                                       const std::function<double(double)>& h, Execution exec) {
  cfg.validate();
  RegimeResult out;
  out.regime = cfg.regime;
  const std::string settings = std::string(regime_name(cfg.regime)) + " " + f.name();

  if (cfg.regime == Regime::dense) {
    if (h) throw std::invalid_argument("a time weight h applies to the critical regime only");
    const auto v = map_replicas(cfg.replicas, exec,
                                [&](std::size_t i) { return time_integrated(f, draw_I_o(cfg, i).ell); });
    out.dense = summarize(v, settings);
    return out;
  }

  if (cfg.regime == Regime::sparse) {
    if (h) throw std::invalid_argument("a time weight h applies to the critical regime only");
    const long long n_max = poisson_table_limit(cfg.n_S);
    const auto values = table_values(cfg, f, n_max, exec);
    out.table = rows_from_ladders(values, cfg.n_S);
    double wsum = 0.0;
    for (const auto& r : out.table) wsum += r.poisson_weight;
    std::vector<double> mixed;
    mixed.reserve(values.size());
    for (const auto& v : values) {
      double m = 0.0;
      for (std::size_t n = 0; n < v.size(); ++n) m += out.table[n].poisson_weight * v[n];
      mixed.push_back(m / wsum);
    }
    out.mixture = summarize(mixed, settings + " mixture");
    return out;
  }

  // critical
  if (f.time_dependent())
    throw std::invalid_argument("critical regime takes a time-independent f; pass the time weight as h");
  const double radius = std::pow(cfg.n_S / unit_ball_volume(cfg.dim), 1.0 / cfg.dim);
  const std::size_t steps = std::max<std::size_t>(cfg.critical_steps, 2);
  std::vector<double> times(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) times[k] = static_cast<double>(k) / static_cast<double>(steps);

  const auto paths = map_replicas(cfg.replicas, exec, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(cfg.seed, kCriticalStream, i);
    const std::vector<Point> w = sample_brownian_path(times, cfg.dim, derive_seed(s, 0));
    double reach = 0.0;
    for (const Point& p : w)
      for (int k = 0; k < cfg.dim; ++k) reach = std::max(reach, std::abs(p[k]));
    const Window win{cfg.dim, 2.0 * (reach + radius) + 2.0, Boundary::open};
    const Point c = torus_center(win);
    std::vector<long long> counts(w.size(), 0);
    if (radius > 0.0) {
      const PointSet sinks = sample_ppp(1.0, win, derive_seed(s, 1));
      for (std::size_t k = 0; k < w.size(); ++k)
        counts[k] = static_cast<long long>(ball_count(sinks, c + w[k], radius));
    }
    return counts;
  });

  long long n_max = poisson_table_limit(cfg.n_S);
  for (const auto& p : paths) n_max = std::max(n_max, *std::max_element(p.begin(), p.end()));
  CriticalResult& cr = out.critical;
  cr.table = conditional_table(cfg, f, n_max, exec);

  const auto weight = [&](double t) { return h ? h(t) : 1.0; };
  cr.samples.reserve(paths.size());
  for (const auto& p : paths) {
    double acc = 0.0;
    for (std::size_t k = 0; k <= steps; ++k) {
      const double end = (k == 0 || k == steps) ? 0.5 : 1.0;
      acc += end * cr.table[static_cast<std::size_t>(p[k])].conditional_mean * weight(times[k]);
    }
    cr.samples.push_back(acc / static_cast<double>(steps));
    cr.counts_at_half.push_back(p[steps / 2]);
  }
  cr.mean = summarize(cr.samples, settings);
  return out;
}

std::vector<SweepRow> figure2_sweep(const LimitConfig& cfg, const std::vector<double>& n_S_grid,
                                    const std::vector<Statistic>& stats, Execution exec) {
  cfg.validate();
  const std::size_t ng = n_S_grid.size(), ns = stats.size();
  // values[i][g * ns + s]
  const auto values = map_replicas(cfg.replicas, exec, [&](std::size_t i) {
    std::vector<long long> N(ng);
    long long top = 0;
    for (std::size_t g = 0; g < ng; ++g) top = std::max(top, N[g] = coupled_sink_count(cfg, i, n_S_grid[g]));
    const std::vector<double> ladder = draw_I_o_ladder(cfg, i, top);
    std::vector<double> v(ng * ns);
    for (std::size_t g = 0; g < ng; ++g)
      for (std::size_t s = 0; s < ns; ++s)
        v[g * ns + s] = time_integrated(stats[s], ladder[static_cast<std::size_t>(N[g])]);
    return v;
  });

  std::vector<SweepRow> rows;
  for (std::size_t g = 0; g < ng; ++g)
    for (std::size_t s = 0; s < ns; ++s) {
      RunningStats acc;
      for (const auto& v : values) acc.add(v[g * ns + s]);
      rows.push_back({n_S_grid[g], stats[s].name(), acc.mean(), acc.std_error(), acc.count()});
    }
  return rows;
}

}  // namespace mscale
