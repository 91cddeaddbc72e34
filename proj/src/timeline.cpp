#include "mscale/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mscale {

Scenario sample_scenario(const ConnectivityConfig& cfg, const Window& window, Horizon horizon, double rate,
                         const WaypointLaw& law, std::uint64_t seed, Execution exec) {
  Point center(window.dim);
  for (int k = 0; k < window.dim; ++k) center[k] = 0.5 * window.side;
  return Scenario{
      sample_ensemble(cfg.node_intensity, window, horizon, rate, law, derive_seed(seed, 0), exec),
      simulate_trace(center, horizon, rate, law, derive_seed(seed, 1)),
      sample_ppp(cfg.sink_intensity, window, derive_seed(seed, 2)),
  };
}

RelevantSinks relevant_sinks(const Scenario& sc, const ConnectivityConfig& cfg, double t) {
  if (!(cfg.mu > 0.0)) throw std::invalid_argument("stretch factor must be positive");
  RelevantSinks rs;
  rs.range = static_cast<double>(cfg.k) / cfg.mu * cfg.radius;
  const Window& w = sc.sinks.window();
  const Point x0 = wrap(w, sc.typical.position_at(t));
  const double r2 = rs.range * rs.range;
  for (std::size_t j = 0; j < sc.sinks.size(); ++j)
    if (distance_sq(w, x0, sc.sinks[j]) <= r2) rs.indices.push_back(j);
  return rs;
}

namespace {

// Frozen configuration between jump events.
struct State {
  std::vector<Point> nodes;
  Point typical;
};

State snapshot(const Scenario& sc, double t) {
  State st;
  st.nodes.reserve(sc.ensemble.size());
  for (std::size_t i = 0; i < sc.ensemble.size(); ++i) st.nodes.push_back(sc.ensemble.position_at(i, t));
  st.typical = wrap(sc.ensemble.window(), sc.typical.position_at(t));
  return st;
}

PointSet collect(const Window& w, double intensity, const std::vector<Point>& nodes, auto&& keep) {
  PointSet ps(w, intensity);
  for (const Point& p : nodes)
    if (keep(p)) ps.push_back(p);
  return ps;
}

// Reachability of any of `targets` within k hops. Local mode keeps only nodes
// within (k - 1) r of the typical node: a relay on a path of <= k hops sits at
// depth <= k - 1 and hence no farther than that.
bool k_hop_any(const State& st, const Window& w, double intensity, std::span<const Point> targets, int k, double r,
               EventMode mode, BfsWorkspace& ws) {
  std::vector<Point> near_targets;
  const double reach2 = (k * r) * (k * r);
  for (const Point& y : targets)
    if (distance_sq(w, st.typical, y) <= reach2) near_targets.push_back(y);
  if (near_targets.empty()) return false;
  const double relay = (k - 1) * r;
  PointSet ps = mode == EventMode::full_recompute
                    ? collect(w, intensity, st.nodes, [](const Point&) { return true; })
                    : collect(w, intensity, st.nodes,
                              [&](const Point& p) { return distance_sq(w, st.typical, p) <= relay * relay; });
  const SpatialGraph g(std::move(ps), r);
  for (const auto& h : hops_to_targets(g, st.typical, near_targets, k, ws))
    if (h) return true;
  return false;
}

bool in_box(const Window& w, const Point& center, const Point& p, double half) {
  return sup_distance(w, center, p) <= half;
}

bool L_member(const State& st, const Window& w, double intensity, std::span<const Point> sinks, double L, double r,
              EventMode mode, BfsWorkspace& ws) {
  if (sinks.empty()) return false;
  const double half = 0.5 * L;
  PointSet ps = mode == EventMode::full_recompute
                    ? collect(w, intensity, st.nodes, [](const Point&) { return true; })
                    : collect(w, intensity, st.nodes, [&](const Point& p) {
                        if (in_box(w, st.typical, p, half)) return true;
                        for (const Point& y : sinks)
                          if (in_box(w, y, p, half)) return true;
                        return false;
                      });
  const SpatialGraph g(std::move(ps), r);
  if (!percolates_beyond(g, st.typical, L, ws)) return false;
  for (const Point& y : sinks)
    if (percolates_beyond(g, y, L, ws)) return true;
  return false;
}

struct Sweep {
  const Scenario& sc;
  double T;

  // Event-driven evaluation over [0, T]. relevant(old, new, typical) decides
  // whether a node jump can change the answer; typical jumps always can.
  template <class Eval, class Relevant>
  IntervalSet run(EventMode mode, Eval&& eval, Relevant&& relevant) const {
    const Window& w = sc.ensemble.window();
    struct Ev {
      double time;
      std::int64_t node;  // -1: typical node
    };
    std::vector<Ev> events;
    for (const JumpEvent& e : sc.ensemble.events())
      if (e.time > 0.0 && e.time <= T) events.push_back({e.time, static_cast<std::int64_t>(e.node)});
    for (double t : sc.typical.jump_times())
      if (t > 0.0 && t <= T) events.push_back({t, -1});
    std::stable_sort(events.begin(), events.end(), [](const Ev& a, const Ev& b) { return a.time < b.time; });

    State st = snapshot(sc, 0.0);
    std::vector<Interval> pieces;
    bool cur = eval(st);
    double seg_start = 0.0;
    for (const Ev& e : events) {
      bool changed = false;
      if (e.node < 0) {
        st.typical = wrap(w, sc.typical.position_at(e.time));
        changed = true;
      } else {
        const auto i = static_cast<std::size_t>(e.node);
        const Point old = st.nodes[i];
        st.nodes[i] = sc.ensemble.position_at(i, e.time);
        changed = mode == EventMode::full_recompute || relevant(old, st.nodes[i], st.typical);
      }
      if (!changed) continue;
      const bool v = eval(st);
      if (v == cur) continue;
      if (cur) pieces.push_back({seg_start, e.time});
      seg_start = e.time;
      cur = v;
    }
    if (cur) pieces.push_back({seg_start, T});
    return IntervalSet(std::move(pieces));
  }
};

void check_horizon(const Scenario& sc, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("horizon T must be positive");
  if (!sc.ensemble.horizon().contains(0.0) || !sc.ensemble.horizon().contains(T) || !sc.typical.horizon().contains(0.0) ||
      !sc.typical.horizon().contains(T))
    throw std::invalid_argument("scenario traces do not cover [0, T]");
}

IntervalSet xi_k_for_targets(const Scenario& sc, const ConnectivityConfig& cfg, std::vector<Point> targets,
                             EventMode mode) {
  if (cfg.k < 1) throw std::invalid_argument("hop budget k must be positive");
  check_horizon(sc, cfg.T);
  if (targets.empty()) return {};
  const Window& w = sc.ensemble.window();
  const double relay = (cfg.k - 1) * cfg.radius;
  BfsWorkspace ws;
  Sweep sweep{sc, cfg.T};
  return sweep.run(
      mode,
      [&](const State& st) { return k_hop_any(st, w, sc.ensemble.intensity(), targets, cfg.k, cfg.radius, mode, ws); },
      [&](const Point& old, const Point& now, const Point& typ) {
        return distance_sq(w, typ, old) <= relay * relay || distance_sq(w, typ, now) <= relay * relay;
      });
}

}  // namespace

IntervalSet compute_xi_k(const Scenario& sc, const ConnectivityConfig& cfg, EventMode mode) {
  return xi_k_for_targets(sc, cfg, {sc.sinks.points().begin(), sc.sinks.points().end()}, mode);
}

IntervalSet compute_xi_k_single(const Scenario& sc, const ConnectivityConfig& cfg, std::size_t sink) {
  if (sink >= sc.sinks.size()) throw std::out_of_range("sink index out of range");
  return xi_k_for_targets(sc, cfg, {sc.sinks[sink]}, EventMode::relevant_only);
}

namespace {

double require_L(const ConnectivityConfig& cfg) {
  if (!cfg.L || !(*cfg.L > 0.0)) throw std::invalid_argument("finite-range box side L is not set");
  return *cfg.L;
}

std::vector<Point> sink_points(const Scenario& sc, const RelevantSinks& rs) {
  std::vector<Point> out;
  for (std::size_t j : rs.indices) {
    if (j >= sc.sinks.size()) throw std::out_of_range("relevant sink index out of range");
    out.push_back(sc.sinks[j]);
  }
  return out;
}

}  // namespace

IntervalSet compute_xi_L(const Scenario& sc, const RelevantSinks& sinks, const ConnectivityConfig& cfg,
                         EventMode mode) {
  const double L = require_L(cfg);
  check_horizon(sc, cfg.T);
  const std::vector<Point> ys = sink_points(sc, sinks);
  if (ys.empty() || sc.ensemble.size() == 0) return {};
  const Window& w = sc.ensemble.window();
  const double half = 0.5 * L;
  BfsWorkspace ws;
  Sweep sweep{sc, cfg.T};
  return sweep.run(
      mode, [&](const State& st) { return L_member(st, w, sc.ensemble.intensity(), ys, L, cfg.radius, mode, ws); },
      [&](const Point& old, const Point& now, const Point& typ) {
        if (in_box(w, typ, old, half) || in_box(w, typ, now, half)) return true;
        for (const Point& y : ys)
          if (in_box(w, y, old, half) || in_box(w, y, now, half)) return true;
        return false;
      });
}

bool xi_k_member(const Scenario& sc, const ConnectivityConfig& cfg, double t) {
  if (cfg.k < 1) throw std::invalid_argument("hop budget k must be positive");
  const State st = snapshot(sc, t);
  BfsWorkspace ws;
  return k_hop_any(st, sc.ensemble.window(), sc.ensemble.intensity(), sc.sinks.points(), cfg.k, cfg.radius,
                   EventMode::full_recompute, ws);
}

bool xi_L_member(const Scenario& sc, const RelevantSinks& sinks, const ConnectivityConfig& cfg, double t) {
  const double L = require_L(cfg);
  const std::vector<Point> ys = sink_points(sc, sinks);
  const State st = snapshot(sc, t);
  BfsWorkspace ws;
  return L_member(st, sc.ensemble.window(), sc.ensemble.intensity(), ys, L, cfg.radius, EventMode::full_recompute, ws);
}

GridMask xi_L_mask(const Scenario& sc, const RelevantSinks& sinks, const ConnectivityConfig& cfg, const TimeGrid& grid) {
  const double L = require_L(cfg);
  const std::vector<Point> ys = sink_points(sc, sinks);
  GridMask mask(grid.size(), 0);
  if (ys.empty()) return mask;
  BfsWorkspace ws;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const State st = snapshot(sc, grid.at(i));
    mask[i] = L_member(st, sc.ensemble.window(), sc.ensemble.intensity(), ys, L, cfg.radius, EventMode::relevant_only, ws)
                  ? 1
                  : 0;
  }
  return mask;
}

double finite_range_length(const Scenario& sc, const ConnectivityConfig& cfg, double t, double delta, double M) {
  const TimeGrid grid(t, delta, M);
  const RelevantSinks rs = relevant_sinks(sc, cfg, t);
  return discretized_length(xi_L_mask(sc, rs, cfg, grid), grid);
}

double IntervalMeasure::total_weight() const {
  double s = 0.0;
  for (const MeasureSample& m : samples) s += m.weight;
  return s;
}

IntervalMeasure build_measure(const IntervalSet& xi, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("horizon T must be positive");
  IntervalMeasure m;
  m.T = T;
  const IntervalSet clipped = truncate(xi, {0.0, T});
  for (const Interval& iv : clipped.intervals()) {
    if (iv.length() == 0.0) continue;
    m.samples.push_back({iv.length(), iv.lo / T, iv.hi / T, iv.length() / T});
  }
  return m;
}

std::vector<MeasureSample> measure_points(const IntervalMeasure& m, double quadrature_step) {
  if (!(quadrature_step > 0.0)) throw std::invalid_argument("quadrature step must be positive");
  std::vector<MeasureSample> pts;
  for (const MeasureSample& s : m.samples) {
    const double a = s.t_lo * m.T, b = s.t_hi * m.T;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / quadrature_step)));
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double mid = a + (static_cast<double>(i) + 0.5) * h;
      pts.push_back({s.ell, mid / m.T, mid / m.T, h / m.T});
    }
  }
  return pts;
}

Statistic Statistic::f1() { return Statistic{}; }

Statistic Statistic::f2(double cap) {
  if (!(cap > 0.0)) throw std::invalid_argument("truncation level must be positive");
  Statistic s;
  s.kind_ = Kind::f2;
  s.cap_ = cap;
  return s;
}

Statistic Statistic::f3() {
  Statistic s;
  s.kind_ = Kind::f3;
  return s;
}

Statistic Statistic::custom(std::function<double(double, double)> fn, double bound, bool time_dependent) {
  if (!fn) throw std::invalid_argument("custom statistic needs a function");
  if (!std::isfinite(bound)) throw std::invalid_argument("custom statistic must be bounded; truncate it first");
  Statistic s;
  s.kind_ = Kind::custom;
  s.fn_ = std::move(fn);
  s.bound_ = bound;
  s.time_dependent_ = time_dependent;
  return s;
}

double Statistic::operator()(double ell, double t) const {
  switch (kind_) {
    case Kind::f1:
      return 1.0;
    case Kind::f2:
      return std::min(ell, cap_);
    case Kind::f3:
      return ell > 0.0 ? 1.0 / ell : 0.0;
    case Kind::custom: {
      const double v = fn_(ell, t);
      if (!(std::abs(v) <= bound_)) throw std::domain_error("custom statistic exceeded its declared bound");
      return v;
    }
  }
  return 0.0;
}

const char* Statistic::name() const {
  switch (kind_) {
    case Kind::f1:
      return "f1";
    case Kind::f2:
      return "f2";
    case Kind::f3:
      return "f3";
    case Kind::custom:
      return "custom";
  }
  return "?";
}

double evaluate_statistic(const IntervalMeasure& m, const Statistic& f, double quadrature_step) {
  double total = 0.0;
  if (!f.time_dependent()) {
    for (const MeasureSample& s : m.samples) total += s.weight * f(s.ell, s.t_lo);
    return total;
  }
  // Composite Simpson in normalized time over each component.
  for (const MeasureSample& s : m.samples) {
    const double width = s.t_hi - s.t_lo;
    auto n = static_cast<std::size_t>(std::ceil(width * m.T / quadrature_step));
    n = std::max<std::size_t>(2, n + (n % 2));
    const double h = width / static_cast<double>(n);
    double acc = f(s.ell, s.t_lo) + f(s.ell, s.t_hi);
    for (std::size_t i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(s.ell, s.t_lo + static_cast<double>(i) * h);
    total += acc * h / 3.0;
  }
  return total;
}

void write_measure_csv(std::ostream& os, std::size_t replica, const IntervalMeasure& m) {
  const auto old = os.precision(17);
  for (const MeasureSample& s : m.samples)
    os << replica << ',' << s.t_lo * m.T << ',' << s.t_hi * m.T << ',' << s.ell << ',' << s.weight << '\n';
  os.precision(old);
}

DecorrelationResult sample_covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 3) throw std::invalid_argument("need matching samples, at least three");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  RunningStats prod;
  for (std::size_t i = 0; i < a.size(); ++i) prod.add((a[i] - ma) * (b[i] - mb));
  DecorrelationResult r;
  r.covariance = prod.mean() * n / (n - 1.0);
  r.std_error = prod.std_error();
  r.replicas = a.size();
  r.mean_first = ma;
  r.mean_second = mb;
  return r;
}

namespace {

double auto_side(const DecorrelationSetup& s) {
  if (s.window_side > 0.0) return s.window_side;
  const auto& c = s.cfg;
  const double range = static_cast<double>(c.k) / c.mu * c.radius;
  // Sinks up to `range` away carry their own L-box; leave room for drift.
  return 2.0 * (range + 0.5 * c.L.value_or(0.0) + 2.0 * c.radius) + 4.0;
}

struct PairDraw {
  double first = 0.0;
  double second = 0.0;
};

// g(I_{k,L,delta,M}) at times 0 and t, both from the same realization; the stretch between the two observation windows is skipped
// with advance_positions.
PairDraw decorrelation_pair(const DecorrelationSetup& s, double t, std::uint64_t seed) {
  const ConnectivityConfig& cfg = s.cfg;
  const Window w{s.dim, auto_side(s), Boundary::periodic};
  const TimeGrid g0(0.0, s.delta, s.M);
  const double ext = g0.span() / 2.0;
  auto g = [&](double ell) { return std::min(ell, s.M) / s.M; };
  ConnectivityConfig c = cfg;
  PairDraw out;
  if (t <= 2.0 * ext) {
    c.T = t + ext;
    Scenario sc = sample_scenario(c, w, {-ext, t + ext}, s.rate, s.law, seed);
    out.first = g(finite_range_length(sc, c, 0.0, s.delta, s.M));
    out.second = g(finite_range_length(sc, c, t, s.delta, s.M));
    return out;
  }
  Scenario a = sample_scenario(c, w, {-ext, ext}, s.rate, s.law, seed);
  out.first = g(finite_range_length(a, c, 0.0, s.delta, s.M));
  const double gap = (t - ext) - ext;
  PointSet at_end = a.ensemble.positions_at(ext);
  PointSet moved = advance_positions(at_end, gap, s.rate, s.law, derive_seed(seed, 10));
  const Horizon hb{t - ext, t + ext};
  const Point typ = advance_point(a.typical.position_at(ext), gap, s.rate, s.law, derive_seed(seed, 11));
  Scenario b{MobileEnsemble(moved, hb, s.rate, s.law, derive_seed(seed, 12)),
             simulate_trace(typ, hb, s.rate, s.law, derive_seed(seed, 13)), a.sinks};
  out.second = g(finite_range_length(b, c, t, s.delta, s.M));
  return out;
}

}  // namespace

DecorrelationResult decorrelation_diagnostic(const DecorrelationSetup& setup, double t_frac, std::size_t replicas,
                                             std::uint64_t seed, Execution exec) {
  if (!(t_frac > 0.0 && t_frac < 1.0)) throw std::invalid_argument("t_frac must lie in (0, 1)");
  require_L(setup.cfg);
  const double t = t_frac * setup.cfg.T;
  const auto draws = map_replicas(replicas, exec, [&](std::size_t i) {
    return decorrelation_pair(setup, t, derive_seed(seed, i));
  });
  std::vector<double> a, b;
  for (const PairDraw& d : draws) {
    a.push_back(d.first);
    b.push_back(d.second);
  }
  return sample_covariance(a, b);
}

DecorrelationResult decorrelation_independent(const DecorrelationSetup& setup, double t_frac, std::size_t replicas,
                                              std::uint64_t seed, Execution exec) {
  if (!(t_frac > 0.0 && t_frac < 1.0)) throw std::invalid_argument("t_frac must lie in (0, 1)");
  require_L(setup.cfg);
  const double t = t_frac * setup.cfg.T;
  const auto draws = map_replicas(replicas, exec, [&](std::size_t i) {
    PairDraw x = decorrelation_pair(setup, t, derive_seed(seed, i, 0));
    PairDraw y = decorrelation_pair(setup, t, derive_seed(seed, i, 1));
    return PairDraw{x.first, y.second};
  });
  std::vector<double> a, b;
  for (const PairDraw& d : draws) {
    a.push_back(d.first);
    b.push_back(d.second);
  }
  return sample_covariance(a, b);
}

}  // namespace mscale
