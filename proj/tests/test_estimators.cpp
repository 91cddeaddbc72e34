#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mscale/estimators.hpp"
#include "mscale/graph.hpp"
#include "oracles.hpp"

using namespace mscale;

TEST_SUITE("estimators") {

TEST_CASE("scaling parameters solve lambda_S (k / mu)^d |B_1| = n_S") {
  const ScalingParams p = resolve_scaling(2.0, 0.5, 1e4, 8.1, 2);
  CHECK(p.lambda_S == doctest::Approx(0.01));
  CHECK(p.lambda_S * std::pow(p.k_exact / 8.1, 2) * unit_ball_volume(2) == doctest::Approx(2.0));
  CHECK(p.k == std::lround(p.k_exact));
  CHECK(p.implied_n_S() == doctest::Approx(2.0).epsilon(0.05));
  CHECK(resolve_scaling(1e-6, 0.5, 10.0, 1.0, 2).k == 1);
  CHECK_THROWS(resolve_scaling(2.0, 0.0, 10.0, 1.0, 2));
  for (int d = 1; d <= 3; ++d)
    CHECK(unit_ball_volume(d) * std::pow(critical_radius(3.0, d), d) == doctest::Approx(3.0));
}

TEST_CASE("spanning test matches brute-force components") {
  int spans = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Window w{2, 8.0, Boundary::open};
    const PointSet ps = sample_ppp(1.2 + 0.01 * static_cast<double>(s), w, s);
    const auto label = oracle::components(oracle::adjacency(ps, 1.0));
    bool want = false;
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = 0; j < ps.size(); ++j)
        want = want || (label[i] == label[j] && ps[i][0] <= 0.5 && ps[j][0] >= 7.5);
    CHECK(spans_left_right(ps, 1.0) == want);
    spans += want;
  }
  CHECK(spans > 0);
  CHECK(spans < 40);
}

TEST_CASE("theta estimate: planted-origin BFS, determinism and trivial cases") {
  const Window w{2, 16.0, Boundary::periodic};
  const auto a = estimate_theta(1.5, 1.0, w, 6.0, 60, 4, Execution::serial);
  const auto b = estimate_theta(1.5, 1.0, w, 6.0, 60, 4, Execution::parallel);
  CHECK(a.value == b.value);
  CHECK(a.value > 0.5);
  CHECK(a.value <= 1.0);
  CHECK(estimate_theta(0.0, 1.0, w, 6.0, 10, 4).value == 0.0);
  CHECK_THROWS(estimate_theta(1.5, 1.0, w, 9.0, 10, 4));
  // Replica i is the box percolation of the i-th derived PPP.
  const Point o{8.0, 8.0};
  double hits = 0.0;
  for (std::size_t i = 0; i < 60; ++i) hits += oracle::percolates(sample_ppp(1.5, w, derive_seed(4, i)), 1.0, o, 6.0);
  CHECK(a.value == doctest::Approx(hits / 60.0));
}

TEST_CASE("default lambda sweep") {
  const auto s = default_lambda_sweep(0.1, 2, 9);
  REQUIRE(s.size() == 9);
  CHECK(s.front() == doctest::Approx(125.0));
  CHECK(s.back() == doctest::Approx(165.0));
  CHECK_THROWS(default_lambda_sweep(0.1, 2, 1));
}

TEST_CASE("lambda_c estimate brackets the threshold on a small run") {
  const auto r = estimate_lambda_c(1.0, 2, {8.0, 14.0}, default_lambda_sweep(1.0, 2, 5), 60, 2);
  REQUIRE(r.curves.size() == 2);
  for (const auto& c : r.curves) {
    CHECK(c.trials == 60);
    CHECK(c.successes.front() <= c.successes.back());
  }
  CHECK(r.estimate.value > 1.2);
  CHECK(r.estimate.value < 1.7);
  const auto again = estimate_lambda_c(1.0, 2, {8.0, 14.0}, default_lambda_sweep(1.0, 2, 5), 60, 2,
                                       Execution::serial);
  CHECK(again.estimate.value == r.estimate.value);
}

TEST_CASE("stretch factor: hop counts dominate radius-normalized distance") {
  MuSetup s;
  s.window_side = 60.0;
  s.min_distance = 5.0;
  s.max_distance = 25.0;
  s.pairs = 40;
  const MuResult a = estimate_mu(s, Execution::serial);
  const MuResult b = estimate_mu(s, Execution::parallel);
  REQUIRE(a.pairs.size() == 40);
  CHECK(a.estimate.value == b.estimate.value);
  for (const MuPair& p : a.pairs) {
    CHECK(p.distance >= s.min_distance);
    CHECK(p.distance <= s.max_distance);
    CHECK(p.hops >= 1);
  }
  CHECK(a.estimate.value >= 1.0);
}

TEST_CASE("sweep CSV") {
  std::ostringstream os;
  write_sweep_csv(os, {{1.5, EstimateWithError{0.25, 0.01, 10, ""}}});
  CHECK(os.str().find("parameter,estimate,std_error,replicas") != std::string::npos);
  CHECK(os.str().find("1.5,0.25,0.01,10") != std::string::npos);
}

}
