#include "mscale/estimators.hpp"

#include <algorithm>
#include <boost/random/binomial_distribution.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mscale/graph.hpp"

namespace mscale {

double ScalingParams::implied_n_S() const {
  return lambda_S * std::pow(static_cast<double>(k) / mu_hat, dim) * unit_ball_volume(dim);
}

ScalingParams resolve_scaling(double n_S, double alpha, double T, double mu_hat, int dim) {
  if (!(n_S > 0.0) || !(alpha > 0.0) || !(T > 0.0) || !(mu_hat > 0.0))
    throw std::invalid_argument("n_S, alpha, T and mu must be positive");
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be in [1, 4]");
  ScalingParams p;
  p.n_S = n_S;
  p.alpha = alpha;
  p.dim = dim;
  p.T = T;
  p.mu_hat = mu_hat;
  p.lambda_S = std::pow(T, -alpha);
  p.k_exact = mu_hat * std::pow(n_S / (p.lambda_S * unit_ball_volume(dim)), 1.0 / dim);
  p.k = std::max(1, static_cast<int>(std::lround(p.k_exact)));
  return p;
}

double critical_radius(double n_S, int dim) {
  if (!(n_S >= 0.0)) throw std::invalid_argument("n_S must be nonnegative");
  return std::pow(n_S / unit_ball_volume(dim), 1.0 / dim);
}

namespace {

Point window_center(const Window& w) {
  Point c(w.dim);
  for (int k = 0; k < w.dim; ++k) c[k] = 0.5 * w.side;
  return c;
}

std::string describe(const char* what, std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  os << what;
  for (const auto& [k, v] : kv) os << ' ' << k << '=' << v;
  return os.str();
}

}  // namespace

EstimateWithError estimate_theta(double lambda, double radius, const Window& window, double L, std::size_t replicas,
                                 std::uint64_t seed, Execution exec) {
  window.validate();
  if (!(lambda >= 0.0) || !(radius > 0.0)) throw std::invalid_argument("need lambda >= 0 and radius > 0");
  if (!(L > 0.0) || window.side < 2.0 * L) throw std::invalid_argument("window side must be at least 2L");
  if (replicas == 0) throw std::invalid_argument("replicas must be positive");
  const Point o = window_center(window);
  const auto hits = map_replicas(replicas, exec, [&](std::size_t i) {
    const PointSet ps = sample_ppp(lambda, window, derive_seed(seed, i));
    if (ps.empty()) return 0.0;
    const SpatialGraph g(ps, radius);
    return percolates_beyond(g, o, L) ? 1.0 : 0.0;
  });
  return summarize(hits, describe("theta", {{"lambda", lambda}, {"radius", radius}, {"side", window.side}, {"L", L}}));
}

bool spans_left_right(const PointSet& ps, double radius) {
  if (ps.empty()) return false;
  const double side = ps.window().side;
  const SpatialGraph g(ps, radius);
  std::vector<std::uint8_t> left(g.component_count(), 0), right(g.component_count(), 0);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double x = ps[i][0];
    if (x <= 0.5 * radius) left[g.component(i)] = 1;
    if (x >= side - 0.5 * radius) right[g.component(i)] = 1;
  }
  for (std::size_t c = 0; c < left.size(); ++c)
    if (left[c] && right[c]) return true;
  return false;
}

std::vector<double> default_lambda_sweep(double radius, int dim, std::size_t points) {
  if (points < 2) throw std::invalid_argument("sweep needs at least two points");
  const double scale = std::pow(radius, -dim);
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = scale * (1.25 + 0.40 * static_cast<double>(i) / static_cast<double>(points - 1));
  return out;
}

namespace {

// Crossing of two logistic curves, or nullopt when the fits are not usable
// or the crossing falls outside [lo, hi].
std::optional<double> crossing(const LogisticFit& a, const LogisticFit& b, double lo, double hi) {
  if (!a.converged || !b.converged) return std::nullopt;
  const double ds = b.scale - a.scale;
  if (std::abs(ds) < 1e-12 * std::max(a.scale, b.scale)) return std::nullopt;
  const double x = (a.mid * b.scale - b.mid * a.scale) / ds;
  if (!(x >= lo && x <= hi)) return std::nullopt;
  return x;
}

LogisticFit fit_curve(const SpanningCurve& c) {
  const std::vector<std::size_t> trials(c.intensities.size(), c.trials);
  return fit_logistic(c.intensities, c.successes, trials);
}

}  // namespace

LambdaCResult estimate_lambda_c(double radius, int dim, const std::vector<double>& sides,
                                const std::vector<double>& intensities, std::size_t replicas, std::uint64_t seed,
                                Execution exec) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (sides.size() < 2) throw std::invalid_argument("need at least two window sides");
  if (intensities.size() < 2) throw std::invalid_argument("need at least two sweep intensities");
  if (replicas == 0) throw std::invalid_argument("replicas must be positive");
  std::vector<double> sorted_sides = sides;
  std::sort(sorted_sides.begin(), sorted_sides.end());

  LambdaCResult res;
  const std::size_t np = intensities.size();
  for (std::size_t s = 0; s < sorted_sides.size(); ++s) {
    const Window w{dim, sorted_sides[s], Boundary::open};
    w.validate();
    // One work item per (intensity, replica); seeds depend on both indices.
    const auto hits = map_replicas(np * replicas, exec, [&](std::size_t item) {
      const std::size_t p = item / replicas, i = item % replicas;
      const PointSet ps = sample_ppp(intensities[p], w, derive_seed(seed, s, p * replicas + i));
      return spans_left_right(ps, radius) ? 1 : 0;
    });
    SpanningCurve c;
    c.side = w.side;
    c.intensities = intensities;
    c.trials = replicas;
    c.successes.assign(np, 0);
    for (std::size_t item = 0; item < hits.size(); ++item) c.successes[item / replicas] += hits[item];
    c.fit = fit_curve(c);
    res.curves.push_back(std::move(c));
  }

  const SpanningCurve& a = res.curves[res.curves.size() - 2];
  const SpanningCurve& b = res.curves.back();
  const double lo = *std::min_element(intensities.begin(), intensities.end());
  const double hi = *std::max_element(intensities.begin(), intensities.end());
  const auto point = [&](const LogisticFit& fa, const LogisticFit& fb, bool& crossed) {
    if (auto x = crossing(fa, fb, lo, hi)) {
      crossed = true;
      return *x;
    }
    crossed = false;
    return 0.5 * (fa.mid + fb.mid);
  };
  const double value = point(a.fit, b.fit, res.used_crossing);

  // Parametric bootstrap of the sweep counts for the error bar.
  constexpr std::size_t kBoot = 200;
  RunningStats boot;
  Engine eng = make_engine(derive_seed(seed, 0xB007));
  for (std::size_t t = 0; t < kBoot; ++t) {
    SpanningCurve ra = a, rb = b;
    for (SpanningCurve* c : {&ra, &rb})
      for (std::size_t p = 0; p < np; ++p) {
        const double q = static_cast<double>(c->successes[p]) / static_cast<double>(c->trials);
        boost::random::binomial_distribution<long long, double> draw(static_cast<long long>(c->trials), q);
        c->successes[p] = static_cast<std::size_t>(draw(eng));
      }
    bool crossed = false;
    const double x = point(fit_curve(ra), fit_curve(rb), crossed);
    if (crossed == res.used_crossing && std::isfinite(x)) boot.add(x);
  }
  res.estimate.value = value;
  res.estimate.std_error = boot.count() > 1 ? std::sqrt(boot.variance()) : std::numeric_limits<double>::infinity();
  res.estimate.replicas = replicas;
  res.estimate.settings = describe("lambda_c", {{"radius", radius}, {"side_a", a.side}, {"side_b", b.side}});
  return res;
}

MuResult estimate_mu(const MuSetup& s, Execution exec) {
  if (!(s.radius > 0.0) || !(s.lambda > 0.0)) throw std::invalid_argument("need lambda > 0 and radius > 0");
  if (!(s.min_distance > 0.0) || s.max_distance < s.min_distance)
    throw std::invalid_argument("pair distances must satisfy 0 < min <= max");
  if (s.max_distance * s.radius >= 0.5 * s.window_side)
    throw std::invalid_argument("pair distances must stay below half the window side");
  if (s.pairs == 0 || s.pairs_per_graph == 0) throw std::invalid_argument("pair counts must be positive");
  const Window w{s.dim, s.window_side, Boundary::periodic};
  w.validate();
  const std::size_t graphs = (s.pairs + s.pairs_per_graph - 1) / s.pairs_per_graph;

  struct GraphOut {
    std::vector<MuPair> pairs;
    std::size_t resampled = 0;
  };
  const auto per_graph = map_replicas(graphs, exec, [&](std::size_t gi) {
    GraphOut out;
    const std::size_t want = std::min(s.pairs_per_graph, s.pairs - gi * s.pairs_per_graph);
    for (std::uint64_t attempt = 0;; ++attempt) {
      const std::uint64_t gs = derive_seed(s.seed, gi, attempt);
      const PointSet ps = sample_ppp(s.lambda, w, derive_seed(gs, 0));
      if (ps.empty()) {
        ++out.resampled;
        continue;
      }
      const SpatialGraph g(ps, s.radius);
      // Supercritical guard: the largest cluster must wrap a good part of the torus.
      if (g.cluster_stats().largest_diameter < 0.5 * s.window_side) {
        if (attempt >= 50) throw std::runtime_error("no spanning cluster; intensity is not supercritical");
        ++out.resampled;
        continue;
      }
      Engine eng = make_engine(derive_seed(gs, 1));
      BfsWorkspace ws;
      while (out.pairs.size() < want) {
        Point x(s.dim), u(s.dim);
        for (int k = 0; k < s.dim; ++k) x[k] = uniform01(eng) * s.window_side;
        // Uniform direction from rejection in the cube.
        double n2 = 0.0;
        do {
          for (int k = 0; k < s.dim; ++k) u[k] = 2.0 * uniform01(eng) - 1.0;
          n2 = u.norm_sq();
        } while (n2 > 1.0 || n2 == 0.0);
        const double dist = s.min_distance + (s.max_distance - s.min_distance) * uniform01(eng);
        const Point y = wrap(w, x + u * (dist * s.radius / std::sqrt(n2)));
        const std::size_t qx = nearest_cluster_point(g, x), qy = nearest_cluster_point(g, y);
        if (g.component(qx) != g.component(qy)) continue;
        const auto h = hop_distance(g, qx, qy, ws);
        if (!h) continue;
        out.pairs.push_back({dist, *h});
      }
      return out;
    }
  });

  MuResult res;
  std::vector<double> xs, ys;
  for (const auto& o : per_graph) {
    res.resampled_graphs += o.resampled;
    for (const MuPair& p : o.pairs) {
      res.pairs.push_back(p);
      xs.push_back(p.distance);
      ys.push_back(static_cast<double>(p.hops));
    }
  }
  const SlopeFit fit = slope_through_origin(xs, ys);
  res.estimate.value = fit.slope;
  res.estimate.std_error = fit.std_error;
  res.estimate.replicas = res.pairs.size();
  res.estimate.settings = describe("mu", {{"lambda", s.lambda}, {"radius", s.radius}, {"side", s.window_side}});
  return res;
}

void write_sweep_csv(std::ostream& os, const std::vector<std::pair<double, EstimateWithError>>& rows) {
  os << "parameter,estimate,std_error,replicas\n";
  os << std::setprecision(17);
  for (const auto& [p, e] : rows) os << p << ',' << e.value << ',' << e.std_error << ',' << e.replicas << '\n';
}

}  // namespace mscale
