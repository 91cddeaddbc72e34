#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mscale/geometry.hpp"
#include "mscale/parallel.hpp"
#include "mscale/rng.hpp"

namespace mscale {

// Isotropic jump law kappa(dv).
struct WaypointLaw {
  enum class Kind { fixed_jump, isotropic_normalized };

  Kind kind = Kind::fixed_jump;
  double jump_distance = 0.0;  // fixed_jump only

  // Uniform direction, norm exactly `distance`.
  static WaypointLaw fixed_jump(double distance);
  // Standard Gaussian vector: isotropic, coordinate covariance = identity.
  static WaypointLaw isotropic_normalized();

  Point sample(Engine& eng, int dim) const;
  double mean_square_norm(int dim) const;
};

struct Horizon {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
};

// Piecewise-constant trajectory anchored at origin = position at time
// clamp(0, lo, hi). Right-continuous: at a jump time the jump has happened.
class NodeTrace {
 public:
  NodeTrace(Point origin, Horizon horizon, std::vector<double> jump_times, std::vector<Point> displacements);

  const Point& origin() const { return origin_; }
  const Horizon& horizon() const { return horizon_; }
  double anchor() const { return anchor_; }
  std::span<const double> jump_times() const { return times_; }
  std::span<const Point> displacements() const { return displacements_; }

  // Throws std::out_of_range outside the horizon. Not wrapped to any window.
  Point position_at(double t) const;

 private:
  Point origin_;
  Horizon horizon_;
  double anchor_;
  std::vector<double> times_;
  std::vector<Point> displacements_;
  std::vector<Point> offsets_;  // offsets_[m]: displacement from origin once m jumps happened
};

// Jumps after exponential(rate) waiting times. Two-sided horizons are built
// from independent forward and backward one-sided traces out of the anchor.
NodeTrace simulate_trace(const Point& origin, Horizon horizon, double rate, const WaypointLaw& law,
                         std::uint64_t seed);

// The trace simulate_trace would produce from the same seed, generated lazily
// outward from the anchor 0, so memory stays constant however long the
// horizon. Forward queries (t >= 0) must be nondecreasing and backward
// queries (t < 0) nonincreasing.
class TraceWalker {
 public:
  TraceWalker(const Point& origin, double rate, const WaypointLaw& law, std::uint64_t seed);

  Point position_at(double t);

 private:
  struct Side {
    Engine eng;
    double next = 0.0;  // time of the next jump not yet applied
    double last = 0.0;  // last query on this side
    Point offset;
  };

  Point origin_;
  double rate_;
  WaypointLaw law_;
  Side fwd_, bwd_;
};

struct JumpEvent {
  double time;
  std::uint32_t node;
};

// All nodes of a window moving independently; positions are wrapped onto the
// window (periodic) so the time-t marginal stays a homogeneous PPP.
class MobileEnsemble {
 public:
  MobileEnsemble(const PointSet& initial, Horizon horizon, double rate, const WaypointLaw& law,
                 std::uint64_t seed, Execution exec = Execution::serial);

  std::size_t size() const { return traces_.size(); }
  const NodeTrace& trace(std::size_t i) const { return traces_[i]; }
  const Window& window() const { return window_; }
  const Horizon& horizon() const { return horizon_; }
  double rate() const { return rate_; }
  double intensity() const { return intensity_; }

  Point position_at(std::size_t i, double t) const { return wrap(window_, traces_[i].position_at(t)); }
  PointSet positions_at(double t) const;
  // Every jump inside the horizon, sorted by (time, node).
  std::vector<JumpEvent> events() const;

 private:
  Window window_;
  Horizon horizon_;
  double rate_;
  double intensity_;
  std::vector<NodeTrace> traces_;
};

MobileEnsemble sample_ensemble(double intensity, const Window& window, Horizon horizon, double rate,
                               const WaypointLaw& law, std::uint64_t seed, Execution exec = Execution::serial);

// Positions after `gap` more time units of independent jumping, wrapped onto
// the window: each point moves by the sum of Poisson(rate * gap) law draws.
// Used to skip unobserved stretches of a long horizon.
PointSet advance_positions(const PointSet& at_start, double gap, double rate, const WaypointLaw& law,
                           std::uint64_t seed, Execution exec = Execution::serial);
Point advance_point(const Point& p, double gap, double rate, const WaypointLaw& law, std::uint64_t seed);

// Empirical covariance (row-major dim x dim) of X_0(T)/sqrt(T) over replicas.
struct CovarianceEstimate {
  int dim = 0;
  std::size_t replicas = 0;
  std::vector<double> cov;
  double at(int i, int j) const { return cov[static_cast<std::size_t>(i * dim + j)]; }
  double trace() const;
};

CovarianceEstimate diffusive_rescale_check(const WaypointLaw& law, double rate, double T, std::size_t replicas,
                                           int dim, std::uint64_t seed, Execution exec = Execution::parallel);

// Standard Brownian motion started at the origin, sampled on a sorted grid of
// nonnegative times.
std::vector<Point> sample_brownian_path(std::span<const double> times, int dim, std::uint64_t seed);

}  // namespace mscale
