#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mscale {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Finite union of closed intervals in canonical form: sorted, disjoint,
// touching or overlapping pieces merged. Endpoints compare exactly.
class IntervalSet {
 public:
  IntervalSet() = default;
  // Accepts any list of [lo, hi] pairs (lo <= hi) and canonicalizes it.
  explicit IntervalSet(std::vector<Interval> pieces);

  std::span<const Interval> intervals() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }
  bool empty() const { return pieces_.empty(); }
  bool contains(double t) const;
  double total_length() const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> pieces_;
};

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b);
IntervalSet intersect(const IntervalSet& a, const IntervalSet& b);
IntervalSet truncate(const IntervalSet& s, Interval window);
double total_length(const IntervalSet& s);

// I(t, S): length of the component of S containing t, 0 if t is not in S.
double component_length(double t, const IntervalSet& s);

// J_{delta,M}(t) = t + delta * {-n, ..., n} with n = ceil(M / delta).
class TimeGrid {
 public:
  TimeGrid(double center, double step, double half_extent);

  double center() const { return center_; }
  double step() const { return step_; }
  double half_extent() const { return half_extent_; }
  std::size_t steps_per_side() const { return n_; }
  std::size_t size() const { return 2 * n_ + 1; }
  std::size_t center_index() const { return n_; }
  double at(std::size_t i) const {
    return center_ + (static_cast<double>(i) - static_cast<double>(n_)) * step_;
  }
  std::vector<double> points() const;
  // Largest attainable discretized length, 2 n delta.
  double span() const { return 2.0 * static_cast<double>(n_) * step_; }

 private:
  double center_;
  double step_;
  double half_extent_;
  std::size_t n_;
};

// Membership evaluated at the grid points, one byte per point.
using GridMask = std::vector<std::uint8_t>;

// I_{delta,M}(t, S) with S only observed at grid points: the widest run of
// member grid points around the center, times delta; 0 if the center fails.
double discretized_length(const GridMask& membership, const TimeGrid& grid);
double discretized_length(const std::function<bool(double)>& membership, const TimeGrid& grid);

GridMask grid_membership(const IntervalSet& s, const TimeGrid& grid);

}  // namespace mscale
