#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mscale/geometry.hpp"

namespace mscale {

// Union-find with path halving and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);
  std::size_t find(std::size_t i);
  bool unite(std::size_t a, std::size_t b);
  std::size_t size_of(std::size_t i) { return size_[find(i)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

struct ClusterStats {
  std::size_t largest_size = 0;
  // Largest coordinate extent of the largest component, measured on
  // unwrapped coordinates so that a torus-spanning cluster reports >= side.
  double largest_diameter = 0.0;
  double theta_hat = 0.0;
};

// Gilbert graph: an edge joins i and j iff distance(i, j) <= radius.
class SpatialGraph {
 public:
  SpatialGraph(PointSet positions, double radius);

  std::size_t size() const { return positions_.size(); }
  const PointSet& positions() const { return positions_; }
  const Window& window() const { return positions_.window(); }
  double radius() const { return radius_; }
  const GridIndex& grid() const { return grid_; }

  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {adj_.data() + offsets_[i], adj_.data() + offsets_[i + 1]};
  }
  // Component labels are dense in [0, component_count()).
  std::uint32_t component(std::size_t i) const { return label_[i]; }
  std::size_t component_count() const { return sizes_.size(); }
  std::span<const std::size_t> component_sizes() const { return sizes_; }
  // Label of the largest component (lowest label on ties); requires size() > 0.
  std::uint32_t largest_component() const { return largest_; }

  ClusterStats cluster_stats() const;

  // Graph nodes within radius of an arbitrary point (augmentation edges).
  std::vector<std::size_t> attach(const Point& p) const;

 private:
  PointSet positions_;
  double radius_;
  GridIndex grid_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> adj_;
  std::vector<std::uint32_t> label_;
  std::vector<std::size_t> sizes_;
  std::uint32_t largest_ = 0;
};

// Reusable BFS scratch. Each worker owns one; it is never shared.
class BfsWorkspace {
 public:
  void reset(std::size_t n);
  bool visited(std::size_t i) const { return stamp_[i] == current_; }
  int depth(std::size_t i) const { return depth_[i]; }
  void visit(std::size_t i, int d) {
    stamp_[i] = current_;
    depth_[i] = d;
    queue_.push_back(static_cast<std::uint32_t>(i));
  }
  std::vector<std::uint32_t>& queue() { return queue_; }

 private:
  std::vector<std::uint32_t> stamp_;
  std::vector<int> depth_;
  std::vector<std::uint32_t> queue_;
  std::uint32_t current_ = 0;
};

// Edge count of a shortest path, or nullopt when unreachable.
std::optional<int> hop_distance(const SpatialGraph& g, std::size_t i, std::size_t j);
std::optional<int> hop_distance(const SpatialGraph& g, std::size_t i, std::size_t j, BfsWorkspace& ws);

// Hop counts from an extra source point to every node (nullopt if unreachable),
// the source counting as depth 0 and its attached nodes as depth 1.
std::vector<std::optional<int>> hops_from_point(const SpatialGraph& g, const Point& source);

// True iff source reaches target in at most k hops relaying only through
// graph nodes. source and target are augmentation points; neither relays.
bool k_hop_connected(const SpatialGraph& g, const Point& source, const Point& target, int k);
bool k_hop_connected(const SpatialGraph& g, const Point& source, const Point& target, int k, BfsWorkspace& ws);

// Minimal hop count (<= k) from source to each target, nullopt beyond k.
// One BFS serves all targets.
std::vector<std::optional<int>> hops_to_targets(const SpatialGraph& g, const Point& source,
                                                std::span<const Point> targets, int k, BfsWorkspace& ws);

// True iff x reaches, through nodes inside the sup-norm box of side L centered
// at x, a node at sup-distance >= L/2 - r from x.
bool percolates_beyond(const SpatialGraph& g, const Point& x, double L);
bool percolates_beyond(const SpatialGraph& g, const Point& x, double L, BfsWorkspace& ws);
// Same predicate straight from a point set and its grid index (cell size >=
// radius), skipping the adjacency build; the BFS stops at the first exit.
bool percolates_beyond(const PointSet& ps, const GridIndex& idx, double radius, const Point& x, double L,
                       BfsWorkspace& ws);

// Vertex of the largest component closest to x; lowest index on ties.
std::size_t nearest_cluster_point(const SpatialGraph& g, const Point& x);

}  // namespace mscale
