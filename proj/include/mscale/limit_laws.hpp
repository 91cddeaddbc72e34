#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mscale/intervals.hpp"
#include "mscale/mobility.hpp"
#include "mscale/stats.hpp"
#include "mscale/timeline.hpp"

namespace mscale {

enum class Regime { dense, sparse, critical };

const char* regime_name(Regime r);

// Finite-range limit objects: every membership below is "percolates beyond
// its L-box" evaluated on the grid J_{delta,M}(0). Defaults are the
// radius-normalized equivalent of intensity 150 at radius 0.1 with jumps of
// length 0.005, i.e. (1.5, 1, 0.05).
struct LimitConfig {
  Regime regime = Regime::dense;
  double n_S = 2.0;
  // L = 10 radii; delta = 1 is one jump per node per step; M = 400 is the
  // time a node needs to move one radius, r^2 / (rate E|v|^2).
  double L = 10.0;
  double delta = 1.0;
  double M = 400.0;
  double lambda = 1.5;
  double radius = 1.0;
  double rate = 1.0;
  WaypointLaw law = WaypointLaw::fixed_jump(0.05);
  int dim = 2;
  // Torus side is L + 2 * margin; 0 picks a margin no node can cross during
  // the grid horizon.
  double margin = 0.0;
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  // Brownian time steps on [0, 1] for the critical regime.
  std::size_t critical_steps = 200;

  TimeGrid grid() const { return TimeGrid(0.0, delta, M); }
  Window torus() const;
  void validate() const;
};

// Membership kernel for one dynamic ensemble on the torus. The fast path
// evaluates on the local box graph; the reference path rebuilds the full
// torus graph at every grid time. Both must agree.
enum class Kernel { fast, reference };

// {s in grid : X_0(s) in C_L(s)} for a moving typical node started at the torus
// center. stream 0 of the replica.
GridMask sample_xi_typical(const LimitConfig& cfg, std::size_t replica, Kernel kernel = Kernel::fast);
// {s in grid : o in C_L^{(j)}(s)} for a static origin; j >= 1 selects an
// independent copy.
GridMask sample_xi_static(const LimitConfig& cfg, std::size_t replica, std::size_t j, Kernel kernel = Kernel::fast);

struct LimitSample {
  double ell = 0.0;
  long long N = 0;  // conditioning record: sink count
};

// Poisson(n_S) sink count of a replica, coupled across n_S through a shared
// uniform so that it is nondecreasing in n_S.
long long coupled_sink_count(const LimitConfig& cfg, std::size_t replica, double n_S);

// One draw of I_{o,L,delta,M}(N), N ~ Poisson(n_S).
LimitSample draw_I_o(const LimitConfig& cfg, std::size_t replica);
// Same replica at a fixed sink count.
LimitSample draw_I_o_given(const LimitConfig& cfg, std::size_t replica, long long N);
// ell for sink counts 0..max_N of one replica with shared randomness.
std::vector<double> draw_I_o_ladder(const LimitConfig& cfg, std::size_t replica, long long max_N);

// Limit-law value of a statistic: f(ell, t) on connected draws (ell > 0), 0
// otherwise, matching that tau_T only integrates over connected times.
double limit_value(const Statistic& f, double ell, double t = 0.0);

struct ConditionalRow {
  long long n = 0;
  double conditional_mean = 0.0;
  double std_error = 0.0;
  double poisson_weight = 0.0;
};

struct CriticalResult {
  std::vector<double> samples;  // integral_0^1 S''(Y'(B(W_t))) h(t) dt per replica
  EstimateWithError mean;
  std::vector<ConditionalRow> table;
  std::vector<long long> counts_at_half;  // sink count at t = 1/2 per replica
};

struct RegimeResult {
  Regime regime = Regime::dense;
  EstimateWithError dense;                  // dense
  std::vector<ConditionalRow> table;        // sparse
  EstimateWithError mixture;                // sparse: Poisson-weighted conditional means
  CriticalResult critical;                  // critical
};

// Smallest n with P(Poisson(n_S) > n) < tail.
long long poisson_table_limit(double n_S, double tail = 1e-4);

std::vector<ConditionalRow> conditional_table(const LimitConfig& cfg, const Statistic& f, long long max_n,
                                              Execution exec = Execution::parallel);

RegimeResult estimate_regime_statistic(const LimitConfig& cfg, const Statistic& f,
                                       const std::function<double(double)>& h = {},
                                       Execution exec = Execution::parallel);

struct SweepRow {
  double n_S = 0.0;
  std::string statistic;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t replicas = 0;
};

// Dense-regime E[f(I_o(N))] for each n_S, all points sharing replica
// randomness (coupled in N).
std::vector<SweepRow> figure2_sweep(const LimitConfig& cfg, const std::vector<double>& n_S_grid,
                                    const std::vector<Statistic>& stats, Execution exec = Execution::parallel);

}  // namespace mscale
