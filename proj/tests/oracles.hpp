#pragma once

// Brute-force reference implementations used as test oracles. Everything here
// is quadratic or worse on purpose: no grid, no early exit, no shared code
// with the library beyond the distance functions.

#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "mscale/geometry.hpp"
#include "mscale/rng.hpp"

namespace oracle {

using mscale::Point;
using mscale::PointSet;
using mscale::Window;

using Adjacency = std::vector<std::vector<std::size_t>>;

inline Adjacency adjacency(const PointSet& ps, double r) {
  Adjacency adj(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = 0; j < ps.size(); ++j)
      if (i != j && mscale::distance(ps.window(), ps[i], ps[j]) <= r) adj[i].push_back(j);
  return adj;
}

inline std::vector<std::size_t> components(const Adjacency& adj) {
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(adj.size(), none);
  std::size_t next = 0;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (label[s] != none) continue;
    std::vector<std::size_t> stack{s};
    label[s] = next;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : adj[u])
        if (label[v] == none) {
          label[v] = next;
          stack.push_back(v);
        }
    }
    ++next;
  }
  return label;
}

// Hop distances from every source in `sources` (depth 1) over adj.
inline std::vector<int> hops_from(const Adjacency& adj, const std::vector<std::size_t>& sources, int start_depth) {
  std::vector<int> d(adj.size(), -1);
  std::queue<std::size_t> q;
  for (std::size_t s : sources)
    if (d[s] < 0) {
      d[s] = start_depth;
      q.push(s);
    }
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop();
    for (std::size_t v : adj[u])
      if (d[v] < 0) {
        d[v] = d[u] + 1;
        q.push(v);
      }
  }
  return d;
}

inline std::vector<std::size_t> within(const PointSet& ps, const Point& p, double r) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (mscale::distance(ps.window(), p, ps[i]) <= r) out.push_back(i);
  return out;
}

// Minimal hops from source to target relaying through nodes of ps.
inline std::optional<int> point_hops(const PointSet& ps, double r, const Point& source, const Point& target) {
  if (mscale::distance(ps.window(), source, target) <= r) return 1;
  const auto d = hops_from(adjacency(ps, r), within(ps, source, r), 1);
  std::optional<int> best;
  for (std::size_t j : within(ps, target, r))
    if (d[j] >= 0 && (!best || d[j] + 1 < *best)) best = d[j] + 1;
  return best;
}

// Box-restricted reachability of a node at sup-distance >= L/2 - r.
inline bool percolates(const PointSet& ps, double r, const Point& x, double L) {
  const double half = 0.5 * L;
  const Window& w = ps.window();
  std::vector<std::size_t> box;
  std::vector<std::size_t> pos(ps.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (mscale::sup_distance(w, x, ps[i]) <= half) {
      pos[i] = box.size();
      box.push_back(i);
    }
  Adjacency adj(box.size());
  for (std::size_t a = 0; a < box.size(); ++a)
    for (std::size_t b = 0; b < box.size(); ++b)
      if (a != b && mscale::distance(w, ps[box[a]], ps[box[b]]) <= r) adj[a].push_back(b);
  std::vector<std::size_t> start;
  for (std::size_t i : within(ps, x, r))
    if (pos[i] != std::numeric_limits<std::size_t>::max()) start.push_back(pos[i]);
  const auto d = hops_from(adj, start, 1);
  for (std::size_t a = 0; a < box.size(); ++a)
    if (d[a] >= 0 && mscale::sup_distance(w, x, ps[box[a]]) >= half - r) return true;
  return false;
}

inline Point uniform_point(const Window& w, mscale::Engine& eng) {
  Point p(w.dim);
  for (int k = 0; k < w.dim; ++k) p[k] = mscale::uniform01(eng) * w.side;
  return p;
}

}  // namespace oracle
