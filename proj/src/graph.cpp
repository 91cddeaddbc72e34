#include "mscale/graph.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

namespace mscale {

DisjointSets::DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t i) {
  while (parent_[i] != i) {
    parent_[i] = parent_[parent_[i]];
    i = parent_[i];
  }
  return i;
}

bool DisjointSets::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

SpatialGraph::SpatialGraph(PointSet positions, double radius)
    : positions_(std::move(positions)), radius_(radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("graph radius must be positive");
  grid_ = GridIndex(positions_, radius_);
  const std::size_t n = positions_.size();
  const Window& w = positions_.window();
  const double r2 = radius_ * radius_;

  std::vector<std::size_t> degree(n, 0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid_.for_each_candidate(positions_[i], radius_, [&](std::size_t j) {
      if (j <= i) return;
      if (distance_sq(w, positions_[i], positions_[j]) <= r2) {
        edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        ++degree[i];
        ++degree[j];
        sets.unite(i, j);
      }
    });
  }

  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  adj_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (auto [a, b] : edges) {
    adj_[fill[a]++] = b;
    adj_[fill[b]++] = a;
  }
  for (std::size_t i = 0; i < n; ++i) std::sort(adj_.begin() + offsets_[i], adj_.begin() + offsets_[i + 1]);

  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> root_label(n, kUnset);
  label_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    if (root_label[root] == kUnset) {
      root_label[root] = static_cast<std::uint32_t>(sizes_.size());
      sizes_.push_back(0);
    }
    label_[i] = root_label[root];
    ++sizes_[label_[i]];
  }
  for (std::size_t c = 1; c < sizes_.size(); ++c)
    if (sizes_[c] > sizes_[largest_]) largest_ = static_cast<std::uint32_t>(c);
}

ClusterStats SpatialGraph::cluster_stats() const {
  ClusterStats st;
  const std::size_t n = size();
  if (n == 0) return st;
  st.largest_size = sizes_[largest_];
  st.theta_hat = static_cast<double>(st.largest_size) / static_cast<double>(n);

  std::size_t start = 0;
  while (label_[start] != largest_) ++start;
  const Window& w = window();
  std::vector<Point> unwrapped(n);
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> queue{start};
  unwrapped[start] = positions_[start];
  seen[start] = 1;
  Point lo = positions_[start], hi = positions_[start];
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t u = queue[head];
    for (std::uint32_t v : neighbors(u)) {
      if (seen[v]) continue;
      seen[v] = 1;
      unwrapped[v] = unwrapped[u] + displacement(w, positions_[u], positions_[v]);
      for (int k = 0; k < w.dim; ++k) {
        lo[k] = std::min(lo[k], unwrapped[v][k]);
        hi[k] = std::max(hi[k], unwrapped[v][k]);
      }
      queue.push_back(v);
    }
  }
  for (int k = 0; k < w.dim; ++k) st.largest_diameter = std::max(st.largest_diameter, hi[k] - lo[k]);
  return st;
}

std::vector<std::size_t> SpatialGraph::attach(const Point& p) const {
  return radius_neighbors(positions_, grid_, p, radius_);
}

void BfsWorkspace::reset(std::size_t n) {
  if (stamp_.size() < n) {
    stamp_.assign(n, 0);
    depth_.assign(n, 0);
    current_ = 0;
  }
  if (++current_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    current_ = 1;
  }
  queue_.clear();
}

namespace {

void check_vertex(const SpatialGraph& g, std::size_t i) {
  if (i >= g.size()) throw std::out_of_range("vertex index out of range");
}

// BFS from an augmentation point up to max_depth (attached nodes at depth 1).
void bfs_from_point(const SpatialGraph& g, const Point& source, int max_depth, BfsWorkspace& ws) {
  ws.reset(g.size());
  if (max_depth < 1) return;
  for (std::size_t j : g.attach(source)) ws.visit(j, 1);
  auto& q = ws.queue();
  for (std::size_t head = 0; head < q.size(); ++head) {
    const std::uint32_t u = q[head];
    const int du = ws.depth(u);
    if (du >= max_depth) continue;
    for (std::uint32_t v : g.neighbors(u))
      if (!ws.visited(v)) ws.visit(v, du + 1);
  }
}

}  // namespace

std::optional<int> hop_distance(const SpatialGraph& g, std::size_t i, std::size_t j) {
  BfsWorkspace ws;
  return hop_distance(g, i, j, ws);
}

std::optional<int> hop_distance(const SpatialGraph& g, std::size_t i, std::size_t j, BfsWorkspace& ws) {
  check_vertex(g, i);
  check_vertex(g, j);
  if (i == j) return 0;
  if (g.component(i) != g.component(j)) return std::nullopt;
  ws.reset(g.size());
  ws.visit(i, 0);
  auto& q = ws.queue();
  for (std::size_t head = 0; head < q.size(); ++head) {
    const std::uint32_t u = q[head];
    for (std::uint32_t v : g.neighbors(u)) {
      if (ws.visited(v)) continue;
      if (v == j) return ws.depth(u) + 1;
      ws.visit(v, ws.depth(u) + 1);
    }
  }
  return std::nullopt;
}

std::vector<std::optional<int>> hops_from_point(const SpatialGraph& g, const Point& source) {
  BfsWorkspace ws;
  bfs_from_point(g, source, std::numeric_limits<int>::max(), ws);
  std::vector<std::optional<int>> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    if (ws.visited(i)) out[i] = ws.depth(i);
  return out;
}

bool k_hop_connected(const SpatialGraph& g, const Point& source, const Point& target, int k) {
  BfsWorkspace ws;
  return k_hop_connected(g, source, target, k, ws);
}

bool k_hop_connected(const SpatialGraph& g, const Point& source, const Point& target, int k, BfsWorkspace& ws) {
  const Point targets[1] = {target};
  return hops_to_targets(g, source, targets, k, ws)[0].has_value();
}

std::vector<std::optional<int>> hops_to_targets(const SpatialGraph& g, const Point& source,
                                                std::span<const Point> targets, int k, BfsWorkspace& ws) {
  if (k < 1) throw std::invalid_argument("hop budget k must be positive");
  const Window& w = g.window();
  const double r2 = g.radius() * g.radius();
  std::vector<std::optional<int>> out(targets.size());
  bool need_bfs = false;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (distance_sq(w, source, targets[t]) <= r2) out[t] = 1;
    else need_bfs = true;
  }
  if (!need_bfs || k == 1) return out;
  // A path source -> n_1 -> ... -> n_m -> target has m + 1 hops, so the last
  // relay must sit at depth <= k - 1.
  bfs_from_point(g, source, k - 1, ws);
  if (ws.queue().empty()) return out;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (out[t]) continue;
    int best = std::numeric_limits<int>::max();
    for (std::size_t j : g.attach(targets[t]))
      if (ws.visited(j)) best = std::min(best, ws.depth(j) + 1);
    if (best <= k) out[t] = best;
  }
  return out;
}

namespace {

void check_box(const Window& w, const Point& x, double L) {
  if (!(L > 0.0)) throw std::invalid_argument("box side L must be positive");
  if (w.boundary == Boundary::periodic) {
    if (!(L < w.side)) throw std::invalid_argument("box side L must be smaller than the periodic window side");
    return;
  }
  for (int k = 0; k < w.dim; ++k)
    if (x[k] - 0.5 * L < 0.0 || x[k] + 0.5 * L > w.side)
      throw std::invalid_argument("box Q_L(x) exceeds the open window");
}

}  // namespace

bool percolates_beyond(const SpatialGraph& g, const Point& x, double L) {
  BfsWorkspace ws;
  return percolates_beyond(g, x, L, ws);
}

bool percolates_beyond(const SpatialGraph& g, const Point& x, double L, BfsWorkspace& ws) {
  const Window& w = g.window();
  check_box(w, x, L);
  const double half = 0.5 * L;
  const double exit = half - g.radius();
  const PointSet& ps = g.positions();
  ws.reset(g.size());
  for (std::size_t j : g.attach(x)) {
    const double s = sup_distance(w, x, ps[j]);
    if (s > half) continue;
    if (s >= exit) return true;
    ws.visit(j, 1);
  }
  auto& q = ws.queue();
  for (std::size_t head = 0; head < q.size(); ++head) {
    const std::uint32_t u = q[head];
    for (std::uint32_t v : g.neighbors(u)) {
      if (ws.visited(v)) continue;
      const double s = sup_distance(w, x, ps[v]);
      if (s > half) continue;
      if (s >= exit) return true;
      ws.visit(v, ws.depth(u) + 1);
    }
  }
  return false;
}

bool percolates_beyond(const PointSet& ps, const GridIndex& idx, double radius, const Point& x, double L,
                       BfsWorkspace& ws) {
  const Window& w = ps.window();
  check_box(w, x, L);
  if (idx.cell_size() < radius) throw std::invalid_argument("grid cell size must be at least the radius");
  const double half = 0.5 * L;
  const double exit = half - radius;
  const double r2 = radius * radius;
  ws.reset(ps.size());
  bool found = false;
  // Visits unvisited in-box neighbors of p; flags an exit node.
  const auto expand = [&](const Point& p, int depth) {
    idx.for_each_candidate(p, radius, [&](std::size_t v) {
      if (found || ws.visited(v) || distance_sq(w, p, ps[v]) > r2) return;
      const double s = sup_distance(w, x, ps[v]);
      if (s > half) return;
      if (s >= exit) {
        found = true;
        return;
      }
      ws.visit(v, depth);
    });
  };
  expand(x, 1);
  auto& q = ws.queue();
  for (std::size_t head = 0; head < q.size() && !found; ++head) {
    const std::uint32_t u = q[head];
    expand(ps[u], ws.depth(u) + 1);
  }
  return found;
}

std::size_t nearest_cluster_point(const SpatialGraph& g, const Point& x) {
  if (g.size() == 0) throw std::invalid_argument("nearest_cluster_point on an empty graph");
  const Window& w = g.window();
  const std::uint32_t target = g.largest_component();
  std::size_t best = g.size();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.component(i) != target) continue;
    const double d = distance_sq(w, x, g.positions()[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace mscale
