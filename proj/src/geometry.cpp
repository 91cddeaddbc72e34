#include "mscale/geometry.hpp"

#include <boost/random/poisson_distribution.hpp>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mscale/rng.hpp"

namespace mscale {

void Window::validate() const {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("window dimension must be in [1, 4]");
  if (!(side > 0.0) || !std::isfinite(side)) throw std::invalid_argument("window side must be positive");
}

double Window::volume() const { return std::pow(side, dim); }

Point::Point(std::initializer_list<double> coords) : dim(static_cast<int>(coords.size())) {
  if (coords.size() < 1 || coords.size() > static_cast<std::size_t>(kMaxDim))
    throw std::invalid_argument("point dimension must be in [1, 4]");
  std::copy(coords.begin(), coords.end(), x.begin());
}

Point& Point::operator+=(const Point& o) {
  for (int k = 0; k < dim; ++k) x[k] += o.x[k];
  return *this;
}

Point& Point::operator-=(const Point& o) {
  for (int k = 0; k < dim; ++k) x[k] -= o.x[k];
  return *this;
}

Point& Point::operator*=(double s) {
  for (int k = 0; k < dim; ++k) x[k] *= s;
  return *this;
}

bool operator==(const Point& a, const Point& b) {
  if (a.dim != b.dim) return false;
  for (int k = 0; k < a.dim; ++k)
    if (a.x[k] != b.x[k]) return false;
  return true;
}

double Point::norm_sq() const {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += x[k] * x[k];
  return s;
}

double Point::norm() const { return std::sqrt(norm_sq()); }

namespace {

inline double min_image(double delta, double side) {
  delta = std::fmod(delta, side);
  if (delta > 0.5 * side) delta -= side;
  else if (delta < -0.5 * side) delta += side;
  return delta;
}

}  // namespace

Point displacement(const Window& w, const Point& from, const Point& to) {
  Point d(w.dim);
  for (int k = 0; k < w.dim; ++k) {
    d.x[k] = to.x[k] - from.x[k];
    if (w.boundary == Boundary::periodic) d.x[k] = min_image(d.x[k], w.side);
  }
  return d;
}

double distance_sq(const Window& w, const Point& a, const Point& b) {
  double s = 0.0;
  for (int k = 0; k < w.dim; ++k) {
    double delta = b.x[k] - a.x[k];
    if (w.boundary == Boundary::periodic) delta = min_image(delta, w.side);
    s += delta * delta;
  }
  return s;
}

double distance(const Window& w, const Point& a, const Point& b) { return std::sqrt(distance_sq(w, a, b)); }

double sup_distance(const Window& w, const Point& a, const Point& b) {
  double m = 0.0;
  for (int k = 0; k < w.dim; ++k) {
    double delta = b.x[k] - a.x[k];
    if (w.boundary == Boundary::periodic) delta = min_image(delta, w.side);
    m = std::max(m, std::abs(delta));
  }
  return m;
}

Point wrap(const Window& w, Point p) {
  if (w.boundary != Boundary::periodic) return p;
  for (int k = 0; k < w.dim; ++k) {
    double v = std::fmod(p.x[k], w.side);
    if (v < 0.0) v += w.side;
    // fmod of a tiny negative value can round back up to side
    if (v >= w.side) v = 0.0;
    p.x[k] = v;
  }
  return p;
}

bool inside(const Window& w, const Point& p) {
  if (p.dim != w.dim) return false;
  for (int k = 0; k < w.dim; ++k) {
    if (!std::isfinite(p.x[k]) || p.x[k] < 0.0 || p.x[k] > w.side) return false;
  }
  return true;
}

double unit_ball_volume(int dim) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  const double half = 0.5 * dim;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

PointSet::PointSet(Window window, double intensity) : window_(window), intensity_(intensity) {
  window_.validate();
  if (!(intensity >= 0.0)) throw std::invalid_argument("intensity must be nonnegative");
}

void PointSet::push_back(const Point& p) {
  if (!inside(window_, p)) throw std::invalid_argument("point outside window");
  points_.push_back(p);
}

PointSet sample_ppp(double intensity, const Window& window, std::uint64_t seed) {
  window.validate();
  if (!(intensity >= 0.0) || !std::isfinite(intensity))
    throw std::invalid_argument("intensity must be a finite nonnegative number");
  const double mean = intensity * window.volume();
  // GridIndex stores 32-bit point indices.
  constexpr double kCapacity = 5.0e8;
  if (mean > kCapacity)
    throw std::length_error("expected point count " + std::to_string(mean) + " exceeds capacity");

  PointSet ps(window, intensity);
  if (mean == 0.0) return ps;
  Engine eng = make_engine(seed);
  boost::random::poisson_distribution<long long, double> count_dist(mean);
  const long long n = count_dist(eng);
  for (long long i = 0; i < n; ++i) {
    Point p(window.dim);
    for (int k = 0; k < window.dim; ++k) p.x[k] = window.side * uniform01(eng);
    ps.push_back(p);
  }
  return ps;
}

GridIndex::GridIndex(const PointSet& ps, double cell_size) : window_(ps.window()), cell_size_(cell_size) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
  const int d = window_.dim;
  per_dim_ = std::max(1, static_cast<int>(std::floor(window_.side / cell_size)));
  // Cap the dense table at a few cells per point; wider cells stay correct.
  const double cap = std::max(64.0, 4.0 * static_cast<double>(ps.size()));
  while (per_dim_ > 1 && std::pow(static_cast<double>(per_dim_), d) > cap) per_dim_ = std::max(1, per_dim_ / 2);
  width_ = window_.side / per_dim_;

  std::size_t ncell = 1;
  for (int k = 0; k < d; ++k) ncell *= static_cast<std::size_t>(per_dim_);
  start_.assign(ncell + 1, 0);
  std::vector<std::uint32_t> cell_of_point(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    std::array<int, kMaxDim> c{};
    for (int k = 0; k < d; ++k) c[k] = cell_of(ps[i].x[k]);
    const auto cell = static_cast<std::uint32_t>(linear(c));
    cell_of_point[i] = cell;
    ++start_[cell + 1];
  }
  for (std::size_t c = 0; c < ncell; ++c) start_[c + 1] += start_[c];
  items_.resize(ps.size());
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < ps.size(); ++i) items_[fill[cell_of_point[i]]++] = static_cast<std::uint32_t>(i);
}

int GridIndex::cell_of(double coord) const {
  const int c = static_cast<int>(std::floor(coord / width_));
  return std::clamp(c, 0, per_dim_ - 1);
}

std::size_t GridIndex::linear(const std::array<int, kMaxDim>& c) const {
  std::size_t idx = 0;
  for (int k = window_.dim - 1; k >= 0; --k) idx = idx * static_cast<std::size_t>(per_dim_) + static_cast<std::size_t>(c[k]);
  return idx;
}

std::vector<std::size_t> radius_neighbors(const PointSet& ps, const GridIndex& idx, const Point& center, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
  if (r > idx.cell_size()) throw std::invalid_argument("query radius exceeds grid cell size; rebuild the index");
  const Window& w = ps.window();
  const double r2 = r * r;
  std::vector<std::size_t> out;
  idx.for_each_candidate(center, r, [&](std::size_t j) {
    if (distance_sq(w, center, ps[j]) <= r2) out.push_back(j);
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t ball_count(const PointSet& ps, const Point& center, double r) {
  const Window& w = ps.window();
  const double r2 = r * r;
  std::size_t n = 0;
  for (const Point& p : ps.points())
    if (distance_sq(w, center, p) <= r2) ++n;
  return n;
}

}  // namespace mscale
