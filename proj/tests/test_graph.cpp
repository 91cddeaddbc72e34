#include <doctest.h>

#include <algorithm>
#include <map>

#include "mscale/graph.hpp"
#include "oracles.hpp"

using namespace mscale;

namespace {

struct Case {
  Window w;
  double lambda;
  double r;
};

std::vector<Case> cases() {
  return {{{2, 12.0, Boundary::periodic}, 1.5, 1.0},
          {{2, 12.0, Boundary::open}, 1.3, 1.0},
          {{2, 1.5, Boundary::periodic}, 150.0, 0.1},
          {{3, 6.0, Boundary::periodic}, 0.8, 1.0},
          {{1, 30.0, Boundary::open}, 1.2, 1.0}};
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("disjoint sets") {
  DisjointSets ds(6);
  CHECK(ds.unite(0, 1));
  CHECK(ds.unite(2, 3));
  CHECK(!ds.unite(1, 0));
  CHECK(ds.unite(1, 3));
  CHECK(ds.find(0) == ds.find(2));
  CHECK(ds.size_of(3) == 4);
  CHECK(ds.find(4) != ds.find(5));
}

TEST_CASE("adjacency and components match brute force") {
  std::uint64_t s = 0;
  for (const Case& c : cases()) {
    const PointSet ps = sample_ppp(c.lambda, c.w, derive_seed(21, ++s));
    const SpatialGraph g(ps, c.r);
    const auto adj = oracle::adjacency(ps, c.r);
    const auto label = oracle::components(adj);
    std::map<std::size_t, std::uint32_t> relabel;
    std::vector<std::size_t> sizes(g.component_count(), 0);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      std::vector<std::size_t> nb(g.neighbors(i).begin(), g.neighbors(i).end());
      std::sort(nb.begin(), nb.end());
      CHECK(nb == adj[i]);
      const auto [it, fresh] = relabel.emplace(label[i], g.component(i));
      CHECK(it->second == g.component(i));
      ++sizes[g.component(i)];
    }
    CHECK(relabel.size() == g.component_count());
    CHECK(std::vector<std::size_t>(g.component_sizes().begin(), g.component_sizes().end()) == sizes);
    if (ps.size() > 0) {
      const auto largest = *std::max_element(sizes.begin(), sizes.end());
      CHECK(sizes[g.largest_component()] == largest);
      CHECK(g.cluster_stats().largest_size == largest);
    }
  }
}

TEST_CASE("hop distances match brute BFS") {
  const Window w{2, 15.0, Boundary::periodic};
  const PointSet ps = sample_ppp(1.6, w, 4);
  const SpatialGraph g(ps, 1.0);
  const auto adj = oracle::adjacency(ps, 1.0);
  BfsWorkspace ws;
  for (std::size_t src = 0; src < ps.size(); src += 37) {
    const auto d = oracle::hops_from(adj, {src}, 0);
    for (std::size_t dst = 0; dst < ps.size(); dst += 11) {
      const auto h = hop_distance(g, src, dst, ws);
      if (d[dst] < 0) CHECK(!h);
      else CHECK(h == d[dst]);
    }
  }
}

TEST_CASE("point-sourced hops and k-hop connectivity match brute force") {
  Engine eng(8);
  for (const Case& c : cases()) {
    const PointSet ps = sample_ppp(c.lambda, c.w, derive_seed(22, eng()));
    const SpatialGraph g(ps, c.r);
    const auto adj = oracle::adjacency(ps, c.r);
    BfsWorkspace ws;
    for (int q = 0; q < 20; ++q) {
      const Point src = oracle::uniform_point(c.w, eng);
      const auto d = oracle::hops_from(adj, oracle::within(ps, src, c.r), 1);
      const auto got = hops_from_point(g, src);
      for (std::size_t i = 0; i < ps.size(); ++i) {
        if (d[i] < 0) CHECK(!got[i]);
        else CHECK(got[i] == d[i]);
      }
      std::vector<Point> targets;
      for (int t = 0; t < 5; ++t) targets.push_back(oracle::uniform_point(c.w, eng));
      for (int k : {1, 2, 5, 40}) {
        const auto hops = hops_to_targets(g, src, targets, k, ws);
        for (std::size_t t = 0; t < targets.size(); ++t) {
          const auto want = oracle::point_hops(ps, c.r, src, targets[t]);
          const bool ok = want && *want <= k;
          CHECK(hops[t].has_value() == ok);
          if (ok) CHECK(hops[t] == want);
          CHECK(k_hop_connected(g, src, targets[t], k, ws) == ok);
        }
      }
    }
  }
}

TEST_CASE("k-hop connectivity is monotone in k") {
  const Window w{2, 20.0, Boundary::periodic};
  const PointSet ps = sample_ppp(1.5, w, 31);
  const SpatialGraph g(ps, 1.0);
  Engine eng(3);
  for (int q = 0; q < 50; ++q) {
    const Point a = oracle::uniform_point(w, eng), b = oracle::uniform_point(w, eng);
    bool prev = false;
    for (int k = 1; k <= 30; ++k) {
      const bool now = k_hop_connected(g, a, b, k);
      CHECK((!prev || now));
      prev = now;
    }
  }
}

TEST_CASE("box percolation: graph BFS, grid BFS and brute force agree") {
  Engine eng(12);
  int positives = 0, total = 0;
  for (const Case& c : cases()) {
    if (c.w.dim == 1) continue;
    for (int rep = 0; rep < 6; ++rep) {
      const PointSet ps = sample_ppp(c.lambda, c.w, derive_seed(23, eng()));
      const SpatialGraph g(ps, c.r);
      const GridIndex idx(ps, c.r * 1.3);
      BfsWorkspace ws;
      for (double L : {3.0 * c.r, 6.0 * c.r, 0.45 * c.w.side}) {
        if (L >= 0.9 * c.w.side) continue;
        Point x = oracle::uniform_point(c.w, eng);
        if (c.w.boundary == Boundary::open)
          for (int k = 0; k < c.w.dim; ++k) x[k] = 0.5 * L + (c.w.side - L) * uniform01(eng);
        const bool want = oracle::percolates(ps, c.r, x, L);
        CHECK(percolates_beyond(g, x, L, ws) == want);
        CHECK(percolates_beyond(ps, idx, c.r, x, L, ws) == want);
        positives += want;
        ++total;
      }
    }
  }
  CHECK(positives > 0);
  CHECK(positives < total);
}

TEST_CASE("box percolation rejects an undersized grid") {
  const Window w{2, 10.0, Boundary::periodic};
  const PointSet ps = sample_ppp(1.0, w, 1);
  const GridIndex idx(ps, 0.5);
  BfsWorkspace ws;
  CHECK_THROWS_AS(percolates_beyond(ps, idx, 1.0, Point{5.0, 5.0}, 4.0, ws), std::invalid_argument);
}

TEST_CASE("nearest largest-cluster node matches a scan") {
  const Window w{2, 25.0, Boundary::periodic};
  const PointSet ps = sample_ppp(1.5, w, 77);
  const SpatialGraph g(ps, 1.0);
  Engine eng(1);
  for (int q = 0; q < 30; ++q) {
    const Point x = oracle::uniform_point(w, eng);
    const std::size_t got = nearest_cluster_point(g, x);
    CHECK(g.component(got) == g.largest_component());
    for (std::size_t i = 0; i < ps.size(); ++i)
      if (g.component(i) == g.largest_component()) CHECK(distance(w, x, ps[got]) <= distance(w, x, ps[i]));
  }
}

TEST_CASE("a supercritical torus has a spanning giant cluster") {
  const Window w{2, 40.0, Boundary::periodic};
  const SpatialGraph g(sample_ppp(1.8, w, 5), 1.0);
  const ClusterStats cs = g.cluster_stats();
  CHECK(cs.largest_diameter >= w.side);
  CHECK(cs.theta_hat > 0.5);
}

}
