#include "mscale/mobility.hpp"

#include <algorithm>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <stdexcept>

namespace mscale {

WaypointLaw WaypointLaw::fixed_jump(double distance) {
  if (!(distance > 0.0)) throw std::invalid_argument("jump distance must be positive");
  return {Kind::fixed_jump, distance};
}

WaypointLaw WaypointLaw::isotropic_normalized() { return {Kind::isotropic_normalized, 0.0}; }

Point WaypointLaw::sample(Engine& eng, int dim) const {
  boost::random::normal_distribution<double> normal;
  Point v(dim);
  if (kind == Kind::isotropic_normalized) {
    for (int k = 0; k < dim; ++k) v[k] = normal(eng);
    return v;
  }
  if (dim == 1) {
    v[0] = uniform01(eng) < 0.5 ? -jump_distance : jump_distance;
    return v;
  }
  double n2 = 0.0;
  do {
    for (int k = 0; k < dim; ++k) v[k] = normal(eng);
    n2 = v.norm_sq();
  } while (n2 == 0.0);
  return v * (jump_distance / std::sqrt(n2));
}

double WaypointLaw::mean_square_norm(int dim) const {
  return kind == Kind::isotropic_normalized ? static_cast<double>(dim) : jump_distance * jump_distance;
}

NodeTrace::NodeTrace(Point origin, Horizon horizon, std::vector<double> jump_times, std::vector<Point> displacements)
    : origin_(origin),
      horizon_(horizon),
      anchor_(std::clamp(0.0, horizon.lo, horizon.hi)),
      times_(std::move(jump_times)),
      displacements_(std::move(displacements)) {
  if (!(horizon_.lo <= horizon_.hi)) throw std::invalid_argument("horizon must satisfy lo <= hi");
  if (times_.size() != displacements_.size())
    throw std::invalid_argument("jump times and displacements differ in length");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!horizon_.contains(times_[i]) || times_[i] == anchor_)
      throw std::invalid_argument("jump time outside horizon or at the anchor");
    if (i > 0 && !(times_[i] > times_[i - 1])) throw std::invalid_argument("jump times must be strictly increasing");
  }
  const std::size_t n = times_.size();
  const auto first_after = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), anchor_) - times_.begin());
  offsets_.assign(n + 1, Point(origin_.dim));
  for (std::size_t m = first_after; m < n; ++m) offsets_[m + 1] = offsets_[m] + displacements_[m];
  for (std::size_t m = first_after; m-- > 0;) offsets_[m] = offsets_[m + 1] - displacements_[m];
}

Point NodeTrace::position_at(double t) const {
  if (!horizon_.contains(t)) throw std::out_of_range("time outside the trace horizon");
  const auto m = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
  return origin_ + offsets_[m];
}

NodeTrace simulate_trace(const Point& origin, Horizon horizon, double rate, const WaypointLaw& law,
                         std::uint64_t seed) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("jump rate must be positive");
  if (!(horizon.lo <= horizon.hi)) throw std::invalid_argument("horizon must satisfy lo <= hi");
  const double anchor = std::clamp(0.0, horizon.lo, horizon.hi);
  boost::random::exponential_distribution<double> wait(rate);

  std::vector<double> back_times, fwd_times;
  std::vector<Point> back_disp, fwd_disp;
  {
    Engine eng = make_engine(derive_seed(seed, 0));
    for (double t = anchor + wait(eng); t <= horizon.hi; t += wait(eng)) {
      fwd_times.push_back(t);
      fwd_disp.push_back(law.sample(eng, origin.dim));
    }
  }
  if (horizon.lo < anchor) {
    Engine eng = make_engine(derive_seed(seed, 1));
    for (double t = anchor - wait(eng); t >= horizon.lo; t -= wait(eng)) {
      back_times.push_back(t);
      back_disp.push_back(law.sample(eng, origin.dim));
    }
  }
  std::reverse(back_times.begin(), back_times.end());
  std::reverse(back_disp.begin(), back_disp.end());
  back_times.insert(back_times.end(), fwd_times.begin(), fwd_times.end());
  back_disp.insert(back_disp.end(), fwd_disp.begin(), fwd_disp.end());
  return NodeTrace(origin, horizon, std::move(back_times), std::move(back_disp));
}

TraceWalker::TraceWalker(const Point& origin, double rate, const WaypointLaw& law, std::uint64_t seed)
    : origin_(origin), rate_(rate), law_(law) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("jump rate must be positive");
  boost::random::exponential_distribution<double> wait(rate_);
  fwd_.eng = make_engine(derive_seed(seed, 0));
  fwd_.offset = Point(origin.dim);
  fwd_.next = 0.0 + wait(fwd_.eng);
  bwd_.eng = make_engine(derive_seed(seed, 1));
  bwd_.offset = Point(origin.dim);
  bwd_.next = 0.0 - wait(bwd_.eng);
}

Point TraceWalker::position_at(double t) {
  boost::random::exponential_distribution<double> wait(rate_);
  if (t >= 0.0) {
    if (t < fwd_.last) throw std::logic_error("forward walker queries must be nondecreasing");
    fwd_.last = t;
    for (; fwd_.next <= t; fwd_.next += wait(fwd_.eng)) fwd_.offset = fwd_.offset + law_.sample(fwd_.eng, origin_.dim);
    return origin_ + fwd_.offset;
  }
  if (t > bwd_.last) throw std::logic_error("backward walker queries must be nonincreasing");
  bwd_.last = t;
  for (; bwd_.next > t; bwd_.next -= wait(bwd_.eng)) bwd_.offset = bwd_.offset - law_.sample(bwd_.eng, origin_.dim);
  return origin_ + bwd_.offset;
}

MobileEnsemble::MobileEnsemble(const PointSet& initial, Horizon horizon, double rate, const WaypointLaw& law,
                               std::uint64_t seed, Execution exec)
    : window_(initial.window()), horizon_(horizon), rate_(rate), intensity_(initial.intensity()) {
  auto traces = map_replicas(initial.size(), exec, [&](std::size_t i) {
    return std::vector<NodeTrace>{simulate_trace(initial[i], horizon, rate, law, derive_seed(seed, i))};
  });
  traces_.reserve(traces.size());
  for (auto& t : traces) traces_.push_back(std::move(t.front()));
}

PointSet MobileEnsemble::positions_at(double t) const {
  PointSet ps(window_, intensity_);
  for (std::size_t i = 0; i < traces_.size(); ++i) ps.push_back(position_at(i, t));
  return ps;
}

std::vector<JumpEvent> MobileEnsemble::events() const {
  std::vector<JumpEvent> ev;
  for (std::size_t i = 0; i < traces_.size(); ++i)
    for (double t : traces_[i].jump_times()) ev.push_back({t, static_cast<std::uint32_t>(i)});
  std::sort(ev.begin(), ev.end(), [](const JumpEvent& a, const JumpEvent& b) {
    return a.time < b.time || (a.time == b.time && a.node < b.node);
  });
  return ev;
}

MobileEnsemble sample_ensemble(double intensity, const Window& window, Horizon horizon, double rate,
                               const WaypointLaw& law, std::uint64_t seed, Execution exec) {
  if (window.boundary != Boundary::periodic)
    throw std::invalid_argument("mobile ensembles require a periodic window");
  const PointSet initial = sample_ppp(intensity, window, derive_seed(seed, 0));
  return MobileEnsemble(initial, horizon, rate, law, derive_seed(seed, 1), exec);
}

Point advance_point(const Point& p, double gap, double rate, const WaypointLaw& law, std::uint64_t seed) {
  if (!(gap >= 0.0)) throw std::invalid_argument("gap must be nonnegative");
  if (!(rate > 0.0)) throw std::invalid_argument("jump rate must be positive");
  Engine eng = make_engine(seed);
  boost::random::poisson_distribution<long long, double> count(rate * gap);
  const long long n = gap > 0.0 ? count(eng) : 0;
  Point q = p;
  for (long long j = 0; j < n; ++j) q += law.sample(eng, p.dim);
  return q;
}

PointSet advance_positions(const PointSet& at_start, double gap, double rate, const WaypointLaw& law,
                           std::uint64_t seed, Execution exec) {
  const Window& w = at_start.window();
  const auto moved = map_replicas(at_start.size(), exec, [&](std::size_t i) {
    return wrap(w, advance_point(at_start[i], gap, rate, law, derive_seed(seed, i)));
  });
  PointSet out(w, at_start.intensity());
  for (const Point& q : moved) out.push_back(q);
  return out;
}

double CovarianceEstimate::trace() const {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += at(k, k);
  return s;
}

CovarianceEstimate diffusive_rescale_check(const WaypointLaw& law, double rate, double T, std::size_t replicas,
                                           int dim, std::uint64_t seed, Execution exec) {
  if (!(T > 0.0)) throw std::invalid_argument("horizon T must be positive");
  if (replicas < 2) throw std::invalid_argument("need at least two replicas");
  const double scale = 1.0 / std::sqrt(T);
  const auto endpoints = map_replicas(replicas, exec, [&](std::size_t i) {
    const NodeTrace tr = simulate_trace(Point(dim), {0.0, T}, rate, law, derive_seed(seed, i));
    return tr.position_at(T) * scale;
  });

  CovarianceEstimate est;
  est.dim = dim;
  est.replicas = replicas;
  est.cov.assign(static_cast<std::size_t>(dim * dim), 0.0);
  Point mean(dim);
  for (const Point& p : endpoints) mean += p;
  mean *= 1.0 / static_cast<double>(replicas);
  for (const Point& p : endpoints)
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        est.cov[static_cast<std::size_t>(a * dim + b)] += (p[a] - mean[a]) * (p[b] - mean[b]);
  for (double& c : est.cov) c /= static_cast<double>(replicas - 1);
  return est;
}

std::vector<Point> sample_brownian_path(std::span<const double> times, int dim, std::uint64_t seed) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be in [1, 4]");
  Engine eng = make_engine(seed);
  boost::random::normal_distribution<double> normal;
  std::vector<Point> path;
  path.reserve(times.size());
  Point w(dim);
  double prev = 0.0;
  for (double t : times) {
    if (!(t >= prev)) throw std::invalid_argument("Brownian grid must be sorted and nonnegative");
    const double sd = std::sqrt(t - prev);
    if (sd > 0.0)
      for (int k = 0; k < dim; ++k) w[k] += sd * normal(eng);
    path.push_back(w);
    prev = t;
  }
  return path;
}

}  // namespace mscale
