#include "mscale/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mscale {

IntervalSet::IntervalSet(std::vector<Interval> pieces) {
  for (const Interval& iv : pieces)
    if (!(iv.lo <= iv.hi)) throw std::invalid_argument("interval requires lo <= hi");
  std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  for (const Interval& iv : pieces) {
    if (!pieces_.empty() && iv.lo <= pieces_.back().hi) {
      pieces_.back().hi = std::max(pieces_.back().hi, iv.hi);
    } else {
      pieces_.push_back(iv);
    }
  }
}

bool IntervalSet::contains(double t) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t, [](double v, const Interval& iv) { return v < iv.lo; });
  if (it == pieces_.begin()) return false;
  return std::prev(it)->contains(t);
}

double IntervalSet::total_length() const {
  double s = 0.0;
  for (const Interval& iv : pieces_) s += iv.length();
  return s;
}

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> all(a.intervals().begin(), a.intervals().end());
  all.insert(all.end(), b.intervals().begin(), b.intervals().end());
  return IntervalSet(std::move(all));
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> out;
  auto ia = a.intervals().begin(), ib = b.intervals().begin();
  while (ia != a.intervals().end() && ib != b.intervals().end()) {
    const double lo = std::max(ia->lo, ib->lo);
    const double hi = std::min(ia->hi, ib->hi);
    if (lo <= hi) out.push_back({lo, hi});
    if (ia->hi < ib->hi) ++ia;
    else ++ib;
  }
  return IntervalSet(std::move(out));
}

IntervalSet truncate(const IntervalSet& s, Interval window) {
  return intersect(s, IntervalSet({window}));
}

double total_length(const IntervalSet& s) { return s.total_length(); }

double component_length(double t, const IntervalSet& s) {
  for (const Interval& iv : s.intervals())
    if (iv.contains(t)) return iv.length();
  return 0.0;
}

TimeGrid::TimeGrid(double center, double step, double half_extent)
    : center_(center), step_(step), half_extent_(half_extent) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (!(half_extent > 0.0)) throw std::invalid_argument("grid half extent must be positive");
  // M / delta is often an integer up to rounding (0.3 / 0.1); absorb that.
  const double ratio = half_extent / step;
  n_ = static_cast<std::size_t>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
}

std::vector<double> TimeGrid::points() const {
  std::vector<double> pts(size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = at(i);
  return pts;
}

double discretized_length(const GridMask& membership, const TimeGrid& grid) {
  if (membership.size() != grid.size()) throw std::invalid_argument("mask size does not match the grid");
  const std::size_t c = grid.center_index();
  if (!membership[c]) return 0.0;
  std::size_t lo = c, hi = c;
  while (lo > 0 && membership[lo - 1]) --lo;
  while (hi + 1 < membership.size() && membership[hi + 1]) ++hi;
  return static_cast<double>(hi - lo) * grid.step();
}

double discretized_length(const std::function<bool(double)>& membership, const TimeGrid& grid) {
  GridMask mask(grid.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = membership(grid.at(i)) ? 1 : 0;
  return discretized_length(mask, grid);
}

GridMask grid_membership(const IntervalSet& s, const TimeGrid& grid) {
  GridMask mask(grid.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = s.contains(grid.at(i)) ? 1 : 0;
  return mask;
}

}  // namespace mscale
