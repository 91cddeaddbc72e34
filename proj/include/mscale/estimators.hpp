#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mscale/geometry.hpp"
#include "mscale/parallel.hpp"
#include "mscale/rng.hpp"
#include "mscale/stats.hpp"

namespace mscale {

// lambda_S = T^-alpha and the hop budget k solving
// lambda_S (k / mu)^d |B_1| = n_S, rounded to the nearest integer >= 1.
struct ScalingParams {
  double n_S = 0.0;
  double alpha = 0.0;
  int dim = 2;
  double T = 0.0;
  double mu_hat = 0.0;
  double lambda_S = 0.0;
  double k_exact = 0.0;  // before rounding
  int k = 1;

  // n_S recomputed from (lambda_S, k / mu_hat).
  double implied_n_S() const;
};

ScalingParams resolve_scaling(double n_S, double alpha, double T, double mu_hat, int dim);

// Critical-regime ball radius n_S' = (n_S / |B_1|)^(1/d).
double critical_radius(double n_S, int dim);

// theta_L: fraction of replicas in which a node planted at the window center
// percolates beyond its L-box. Requires window side >= 2L.
EstimateWithError estimate_theta(double lambda, double radius, const Window& window, double L, std::size_t replicas,
                                 std::uint64_t seed, Execution exec = Execution::parallel);

// True iff one component holds a node within r/2 of the left face (x_0 = 0)
// and a node within r/2 of the right face.
bool spans_left_right(const PointSet& ps, double radius);

struct SpanningCurve {
  double side = 0.0;
  std::vector<double> intensities;
  std::vector<std::size_t> successes;
  std::size_t trials = 0;
  LogisticFit fit;
};

struct LambdaCResult {
  EstimateWithError estimate;
  std::vector<SpanningCurve> curves;
  bool used_crossing = false;  // false: fell back to the mean of the midpoints
};

// Finite-size crossing of spanning-probability curves on open windows of the
// given sides. The two largest sides define the crossing.
LambdaCResult estimate_lambda_c(double radius, int dim, const std::vector<double>& sides,
                                const std::vector<double>& intensities, std::size_t replicas, std::uint64_t seed,
                                Execution exec = Execution::parallel);

// Default sweep: lambda r^d from 1.25 to 1.65.
std::vector<double> default_lambda_sweep(double radius, int dim, std::size_t points = 9);

struct MuSetup {
  double lambda = 1.5;
  double radius = 1.0;
  int dim = 2;
  double window_side = 250.0;  // periodic
  double min_distance = 20.0;  // in units of r
  double max_distance = 100.0;
  std::size_t pairs = 500;
  std::size_t pairs_per_graph = 10;
  std::uint64_t seed = 1;
};

struct MuPair {
  double distance = 0.0;  // |x - y| / r
  int hops = 0;
};

struct MuResult {
  EstimateWithError estimate;
  std::vector<MuPair> pairs;
  std::size_t resampled_graphs = 0;
};

// Slope through the origin of hop_distance(q(x), q(y)) against |x - y| / r,
// q(x) the closest largest-cluster node.
MuResult estimate_mu(const MuSetup& setup, Execution exec = Execution::parallel);

void write_sweep_csv(std::ostream& os, const std::vector<std::pair<double, EstimateWithError>>& rows);

}  // namespace mscale
