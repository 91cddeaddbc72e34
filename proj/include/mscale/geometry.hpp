#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace mscale {

inline constexpr int kMaxDim = 4;

enum class Boundary { open, periodic };

// Axis-aligned cube [0, side]^dim.
struct Window {
  int dim = 2;
  double side = 1.0;
  Boundary boundary = Boundary::periodic;

  void validate() const;
  double volume() const;
};

struct Point {
  std::array<double, kMaxDim> x{};
  int dim = 2;

  Point() = default;
  explicit Point(int d) : dim(d) {}
  Point(std::initializer_list<double> coords);

  double& operator[](int i) { return x[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return x[static_cast<std::size_t>(i)]; }

  Point& operator+=(const Point& o);
  Point& operator-=(const Point& o);
  Point& operator*=(double s);
  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend bool operator==(const Point& a, const Point& b);

  double norm_sq() const;
  double norm() const;
};

// Boundary-aware geometry. Periodic windows use the minimal image.
Point displacement(const Window& w, const Point& from, const Point& to);
double distance_sq(const Window& w, const Point& a, const Point& b);
double distance(const Window& w, const Point& a, const Point& b);
double sup_distance(const Window& w, const Point& a, const Point& b);
Point wrap(const Window& w, Point p);
bool inside(const Window& w, const Point& p);

double unit_ball_volume(int dim);

class PointSet {
 public:
  PointSet() = default;
  PointSet(Window window, double intensity);

  // Throws if p lies outside the window or has the wrong dimension.
  void push_back(const Point& p);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point> points() const { return points_; }
  const Window& window() const { return window_; }
  double intensity() const { return intensity_; }

 private:
  Window window_{};
  double intensity_ = 0.0;
  std::vector<Point> points_;
};

// Homogeneous Poisson process on the window; a pure function of its arguments.
PointSet sample_ppp(double intensity, const Window& window, std::uint64_t seed);

// Uniform cell grid over a PointSet in CSR layout. Cells are at least
// cell_size wide, so a ball of radius <= cell_size touches at most 3^d cells.
class GridIndex {
 public:
  GridIndex() = default;
  GridIndex(const PointSet& ps, double cell_size);

  double cell_size() const { return cell_size_; }
  double cell_width() const { return width_; }
  int cells_per_dim() const { return per_dim_; }

  // Calls f(index) for every point in cells overlapping the ball (center, r).
  template <class F>
  void for_each_candidate(const Point& center, double r, F&& f) const;

 private:
  std::size_t linear(const std::array<int, kMaxDim>& c) const;
  int cell_of(double coord) const;

  Window window_{};
  double cell_size_ = 0.0;
  double width_ = 0.0;
  int per_dim_ = 1;
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> items_;
};

// Indices with distance(center, p) <= r. Throws std::invalid_argument when
// r exceeds the index cell size.
std::vector<std::size_t> radius_neighbors(const PointSet& ps, const GridIndex& idx,
                                          const Point& center, double r);

// Closed-ball count by direct scan.
std::size_t ball_count(const PointSet& ps, const Point& center, double r);

// --- template implementation ---

template <class F>
void GridIndex::for_each_candidate(const Point& center, double r, F&& f) const {
  const int d = window_.dim;
  std::array<int, kMaxDim> lo{}, hi{};
  const bool periodic = window_.boundary == Boundary::periodic;
  for (int k = 0; k < d; ++k) {
    if (periodic && per_dim_ <= 2) {
      lo[k] = 0;
      hi[k] = per_dim_ - 1;
      continue;
    }
    int a = static_cast<int>(std::floor((center[k] - r) / width_));
    int b = static_cast<int>(std::floor((center[k] + r) / width_));
    if (!periodic) {
      a = std::max(a, 0);
      b = std::min(b, per_dim_ - 1);
      if (a > b) return;
    } else if (b - a + 1 >= per_dim_) {
      a = 0;
      b = per_dim_ - 1;
    }
    lo[k] = a;
    hi[k] = b;
  }
  std::array<int, kMaxDim> c = lo;
  while (true) {
    std::array<int, kMaxDim> wrapped{};
    for (int k = 0; k < d; ++k) wrapped[k] = ((c[k] % per_dim_) + per_dim_) % per_dim_;
    const std::size_t cell = linear(wrapped);
    for (std::uint32_t j = start_[cell]; j < start_[cell + 1]; ++j) f(static_cast<std::size_t>(items_[j]));
    int k = 0;
    for (; k < d; ++k) {
      if (++c[k] <= hi[k]) break;
      c[k] = lo[k];
    }
    if (k == d) break;
  }
}

}  // namespace mscale
