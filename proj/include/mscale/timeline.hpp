#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "mscale/geometry.hpp"
#include "mscale/graph.hpp"
#include "mscale/intervals.hpp"
#include "mscale/mobility.hpp"
#include "mscale/stats.hpp"

namespace mscale {

struct ConnectivityConfig {
  int k = 1;                          // hop budget
  std::optional<double> L;            // finite-range box side; set for the C_L surrogate
  double node_intensity = 0.0;
  double radius = 1.0;
  double sink_intensity = 0.0;
  double T = 1.0;
  double mu = 1.0;                    // stretch factor, radius-normalized
};

// One finite-T realization: moving nodes, the moving typical node and static
// sinks, all in the same periodic window.
struct Scenario {
  MobileEnsemble ensemble;
  NodeTrace typical;
  PointSet sinks;
};

Scenario sample_scenario(const ConnectivityConfig& cfg, const Window& window, Horizon horizon, double rate,
                         const WaypointLaw& law, std::uint64_t seed, Execution exec = Execution::serial);

// How event-driven evaluation treats jumps.
//  full_recompute: rebuild the whole graph after every jump (reference).
//  relevant_only: skip jumps that cannot affect the answer and evaluate on
//  the local subgraph only. Must agree with full_recompute exactly.
enum class EventMode { full_recompute, relevant_only };

// Y(t, k): sinks within (k / mu) * r of the typical node at time t.
struct RelevantSinks {
  std::vector<std::size_t> indices;
  double range = 0.0;  // absolute distance (k / mu) * r
};
RelevantSinks relevant_sinks(const Scenario& sc, const ConnectivityConfig& cfg, double t);

// Xi^k on the horizon [0, T]: times where some sink is k-hop reachable from
// the typical node. Exact between jump events.
IntervalSet compute_xi_k(const Scenario& sc, const ConnectivityConfig& cfg, EventMode mode = EventMode::relevant_only);
// Xi^k(Y_j) for a single sink (hand-over closure checks).
IntervalSet compute_xi_k_single(const Scenario& sc, const ConnectivityConfig& cfg, std::size_t sink);

// Xi^L(Y(t, k)) on [0, T]: the typical node and at least one of the given
// sinks both percolate beyond their L-boxes. Requires cfg.L.
IntervalSet compute_xi_L(const Scenario& sc, const RelevantSinks& sinks, const ConnectivityConfig& cfg,
                         EventMode mode = EventMode::relevant_only);

// Pointwise membership at a single time (oracles and grid evaluation).
bool xi_k_member(const Scenario& sc, const ConnectivityConfig& cfg, double t);
bool xi_L_member(const Scenario& sc, const RelevantSinks& sinks, const ConnectivityConfig& cfg, double t);
GridMask xi_L_mask(const Scenario& sc, const RelevantSinks& sinks, const ConnectivityConfig& cfg, const TimeGrid& grid);

// I_{k,L,delta,M}(t) = I_{delta,M}(t, Xi^L(Y(t, k))).
double finite_range_length(const Scenario& sc, const ConnectivityConfig& cfg, double t, double delta, double M);

// --- connection-interval measure ---

struct MeasureSample {
  double ell = 0.0;   // component length (clipped to [0, T])
  double t_lo = 0.0;  // normalized time range [a / T, b / T]
  double t_hi = 0.0;
  double weight = 0.0;  // (b - a) / T
};

struct IntervalMeasure {
  std::vector<MeasureSample> samples;
  double T = 0.0;
  double total_weight() const;
};

IntervalMeasure build_measure(const IntervalSet& xi, double T);
// Pointwise rendering: one (ell, s / T) atom per quadrature node of width step.
std::vector<MeasureSample> measure_points(const IntervalMeasure& m, double quadrature_step);

class Statistic {
 public:
  enum class Kind { f1, f2, f3, custom };

  static Statistic f1();
  // cap truncates ell; infinity means no truncation.
  static Statistic f2(double cap = std::numeric_limits<double>::infinity());
  static Statistic f3();
  // |fn| must stay within bound, which must be finite.
  static Statistic custom(std::function<double(double ell, double t)> fn, double bound, bool time_dependent = true);

  Kind kind() const { return kind_; }
  bool time_dependent() const { return time_dependent_; }
  double operator()(double ell, double t) const;
  const char* name() const;

 private:
  Kind kind_ = Kind::f1;
  double cap_ = std::numeric_limits<double>::infinity();
  double bound_ = std::numeric_limits<double>::infinity();
  bool time_dependent_ = false;
  std::function<double(double, double)> fn_;
};

// tau_T(f) = sum over components of (1/T) * integral_a^b f(ell, s / T) ds.
double evaluate_statistic(const IntervalMeasure& m, const Statistic& f, double quadrature_step = 1e-2);

void write_measure_csv(std::ostream& os, std::size_t replica, const IntervalMeasure& m);

// --- decorrelation diagnostic ---

struct DecorrelationResult {
  double covariance = 0.0;
  double std_error = 0.0;
  std::size_t replicas = 0;
  double mean_first = 0.0;
  double mean_second = 0.0;
};

struct DecorrelationSetup {
  ConnectivityConfig cfg;
  double delta = 0.5;
  double M = 10.0;
  double rate = 1.0;
  WaypointLaw law = WaypointLaw::fixed_jump(0.05);
  int dim = 2;
  double window_side = 0.0;  // 0: sized automatically from k/mu and L
};

// Sample covariance of g(I(0)) and g(I(t_frac T)) with g(l) = min(l, M) / M.
DecorrelationResult decorrelation_diagnostic(const DecorrelationSetup& setup, double t_frac, std::size_t replicas,
                                             std::uint64_t seed, Execution exec = Execution::parallel);
// Same statistic with the two arguments taken from independent replicas.
DecorrelationResult decorrelation_independent(const DecorrelationSetup& setup, double t_frac, std::size_t replicas,
                                              std::uint64_t seed, Execution exec = Execution::parallel);

// Covariance with standard error (delta method on the product moments).
DecorrelationResult sample_covariance(std::span<const double> a, std::span<const double> b);

}  // namespace mscale
