#include <doctest.h>

#include <cmath>

#include "mscale/limit_laws.hpp"

using namespace mscale;

namespace {

LimitConfig small() {
  LimitConfig c;
  c.L = 6.0;
  c.delta = 1.0;
  c.M = 12.0;
  c.law = WaypointLaw::fixed_jump(0.4);
  c.replicas = 40;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_SUITE("limit_laws") {

TEST_CASE("config validation") {
  LimitConfig c = small();
  CHECK_NOTHROW(c.validate());
  c.radius = 3.0;
  CHECK_THROWS(c.validate());
  c = small();
  c.margin = 0.2;
  CHECK_THROWS(c.validate());
  c = small();
  c.delta = 20.0;
  CHECK_THROWS(c.validate());
  c = small();
  c.n_S = -1.0;
  CHECK_THROWS(c.validate());
  CHECK(small().torus().side > small().L + 2.0 * small().radius);
}

TEST_CASE("fast and reference kernels produce the same masks") {
  const LimitConfig c = small();
  int ones = 0;
  for (std::size_t rep = 0; rep < 4; ++rep) {
    const GridMask a = sample_xi_typical(c, rep, Kernel::fast);
    CHECK(a == sample_xi_typical(c, rep, Kernel::reference));
    for (std::size_t j = 1; j <= 2; ++j) {
      const GridMask b = sample_xi_static(c, rep, j, Kernel::fast);
      CHECK(b == sample_xi_static(c, rep, j, Kernel::reference));
      for (auto v : b) ones += v;
    }
    for (auto v : a) ones += v;
  }
  CHECK(ones > 0);
}

TEST_CASE("ladder equals the length of typical AND (OR of static copies)") {
  const LimitConfig c = small();
  const TimeGrid g = c.grid();
  for (std::size_t rep = 0; rep < 8; ++rep) {
    const auto ladder = draw_I_o_ladder(c, rep, 4);
    const GridMask typ = sample_xi_typical(c, rep);
    GridMask any(g.size(), 0);
    CHECK(ladder[0] == 0.0);
    for (std::size_t j = 1; j <= 4; ++j) {
      const GridMask s = sample_xi_static(c, rep, j);
      for (std::size_t i = 0; i < g.size(); ++i) any[i] = any[i] || s[i];
      GridMask joint(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) joint[i] = typ[i] && any[i];
      CHECK(ladder[j] == discretized_length(joint, g));
      CHECK(draw_I_o_given(c, rep, static_cast<long long>(j)).ell == ladder[j]);
    }
  }
}

TEST_CASE("coupling: ell is nondecreasing in N and stays in the grid support") {
  const LimitConfig c = small();
  for (std::size_t rep = 0; rep < 30; ++rep) {
    const auto ladder = draw_I_o_ladder(c, rep, 10);
    for (std::size_t n = 1; n < ladder.size(); ++n) CHECK(ladder[n] >= ladder[n - 1]);
    for (double v : ladder) {
      CHECK(v >= 0.0);
      CHECK(v <= c.grid().span());
    }
  }
}

TEST_CASE("coupled sink counts are Poisson and monotone in n_S") {
  const LimitConfig c = small();
  std::vector<long long> counts;
  for (std::size_t rep = 0; rep < 3000; ++rep) {
    counts.push_back(coupled_sink_count(c, rep, 2.5));
    long long prev = 0;
    for (double n = 0.0; n <= 8.0; n += 0.5) {
      const long long k = coupled_sink_count(c, rep, n);
      CHECK(k >= prev);
      prev = k;
    }
  }
  CHECK(chi_square_poisson_pvalue(counts, 2.5) > 0.01);
  CHECK(draw_I_o(c, 7).N == coupled_sink_count(c, 7, c.n_S));
}

TEST_CASE("Poisson table limit") {
  for (double n : {0.5, 2.0, 8.0}) {
    const long long m = poisson_table_limit(n);
    CHECK(1.0 - poisson_cdf(n, m) < 1e-4);
    CHECK(1.0 - poisson_cdf(n, m - 1) >= 1e-4);
  }
  CHECK(poisson_table_limit(0.0) == 0);
}

TEST_CASE("limit_value only counts connected draws") {
  CHECK(limit_value(Statistic::f1(), 0.0) == 0.0);
  CHECK(limit_value(Statistic::f1(), 2.0) == 1.0);
  CHECK(limit_value(Statistic::f3(), 4.0) == 0.25);
}

TEST_CASE("dense regime is the replica mean of draws") {
  const LimitConfig c = small();
  const RegimeResult r = estimate_regime_statistic(c, Statistic::f2(), {}, Execution::serial);
  RunningStats acc;
  for (std::size_t i = 0; i < c.replicas; ++i) acc.add(limit_value(Statistic::f2(), draw_I_o(c, i).ell));
  CHECK(r.dense.value == doctest::Approx(acc.mean()));
  CHECK(r.dense.replicas == c.replicas);
  const RegimeResult p = estimate_regime_statistic(c, Statistic::f2(), {}, Execution::parallel);
  CHECK(p.dense.value == r.dense.value);
  CHECK_THROWS(estimate_regime_statistic(c, Statistic::f1(), [](double) { return 1.0; }));
}

TEST_CASE("sparse regime: table weights and mixture") {
  LimitConfig c = small();
  c.regime = Regime::sparse;
  const RegimeResult r = estimate_regime_statistic(c, Statistic::f1(), {}, Execution::parallel);
  REQUIRE(static_cast<long long>(r.table.size()) == poisson_table_limit(c.n_S) + 1);
  double mix = 0.0, w = 0.0;
  for (const auto& row : r.table) {
    CHECK(row.poisson_weight == doctest::Approx(poisson_pmf(c.n_S, row.n)));
    mix += row.poisson_weight * row.conditional_mean;
    w += row.poisson_weight;
  }
  CHECK(r.table[0].conditional_mean == 0.0);
  CHECK(r.mixture.value == doctest::Approx(mix / w));
  const auto t = conditional_table(c, Statistic::f1(), 3, Execution::serial);
  for (std::size_t n = 0; n < t.size(); ++n) CHECK(t[n].conditional_mean == r.table[n].conditional_mean);
}

TEST_CASE("critical regime: sink counts along the path are Poisson(n_S)") {
  LimitConfig c = small();
  c.regime = Regime::critical;
  c.replicas = 600;
  c.critical_steps = 20;
  c.n_S = 3.0;
  const RegimeResult r = estimate_regime_statistic(c, Statistic::f1(), [](double t) { return 2.0 * t; });
  CHECK(r.critical.samples.size() == 600);
  CHECK(chi_square_poisson_pvalue(r.critical.counts_at_half, 3.0) > 0.01);
  for (double s : r.critical.samples) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0 + 1e-12);
  }
  CHECK_THROWS(estimate_regime_statistic(c, Statistic::custom([](double, double t) { return t; }, 1.0)));
}

TEST_CASE("figure-2 sweep: zero row, determinism and shared randomness") {
  LimitConfig c = small();
  c.replicas = 20;
  const std::vector<Statistic> stats{Statistic::f1(), Statistic::f2(), Statistic::f3()};
  const auto a = figure2_sweep(c, {0.0, 1.0, 4.0}, stats, Execution::serial);
  const auto b = figure2_sweep(c, {0.0, 1.0, 4.0}, stats, Execution::parallel);
  REQUIRE(a.size() == 9);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mean == b[i].mean);
    CHECK(a[i].std_error == b[i].std_error);
  }
  for (std::size_t s = 0; s < 3; ++s) CHECK(a[s].mean == 0.0);
  CHECK(a[3].statistic == "f1");
  CHECK(a[6].mean >= a[3].mean);
  LimitConfig d = c;
  d.n_S = 4.0;
  RunningStats acc;
  for (std::size_t i = 0; i < d.replicas; ++i) acc.add(limit_value(Statistic::f1(), draw_I_o(d, i).ell));
  CHECK(a[6].mean == doctest::Approx(acc.mean()));
}

}
