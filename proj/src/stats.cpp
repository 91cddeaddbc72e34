#include "mscale/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mscale {

void RunningStats::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double n = static_cast<double>(n_ + o.n_);
  const double delta = o.mean_ - mean_;
  mean_ += delta * static_cast<double>(o.n_) / n;
  m2_ += o.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
  n_ += o.n_;
}

double RunningStats::variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

double RunningStats::std_error() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

EstimateWithError summarize(std::span<const double> xs, std::string settings) {
  RunningStats st;
  for (double x : xs) st.add(x);
  return {st.mean(), st.std_error(), st.count(), std::move(settings)};
}

double poisson_pmf(double mean, long long n) {
  if (n < 0) return 0.0;
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return boost::math::pdf(boost::math::poisson_distribution<double>(mean), static_cast<double>(n));
}

double poisson_cdf(double mean, long long n) {
  if (n < 0) return 0.0;
  if (mean == 0.0) return 1.0;
  return boost::math::cdf(boost::math::poisson_distribution<double>(mean), static_cast<double>(n));
}

long long poisson_quantile(double mean, double u) {
  if (!(mean >= 0.0)) throw std::invalid_argument("Poisson mean must be nonnegative");
  if (mean == 0.0) return 0;
  // Sequential search over the pmf recursion; means here are small.
  double p = std::exp(-mean);
  double c = p;
  long long n = 0;
  while (c < u && n < 1000000) {
    ++n;
    p *= mean / static_cast<double>(n);
    c += p;
    if (p == 0.0 && n > mean) break;
  }
  return n;
}

double chi_square_poisson_pvalue(std::span<const long long> samples, double mean) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  const double total = static_cast<double>(samples.size());
  long long max_obs = *std::max_element(samples.begin(), samples.end());
  std::vector<double> observed(static_cast<std::size_t>(max_obs) + 1, 0.0);
  for (long long s : samples) {
    if (s < 0) throw std::invalid_argument("negative count");
    observed[static_cast<std::size_t>(s)] += 1.0;
  }
  // Build classes [lo, hi] left to right, each with expected >= 5; the last
  // class absorbs the upper tail.
  struct Cls {
    double obs = 0.0, expect = 0.0;
  };
  std::vector<Cls> classes;
  Cls cur;
  long long n = 0;
  double cdf_so_far = 0.0;
  while (true) {
    const double p = poisson_pmf(mean, n);
    cur.expect += total * p;
    cdf_so_far += p;
    if (static_cast<std::size_t>(n) < observed.size()) cur.obs += observed[static_cast<std::size_t>(n)];
    const double tail = total * std::max(0.0, 1.0 - cdf_so_far);
    if (cur.expect >= 5.0 && tail >= 5.0) {
      classes.push_back(cur);
      cur = {};
    } else if (tail < 5.0 && n >= max_obs) {
      // Pool everything left, including the unobserved upper tail.
      cur.expect += tail;
      for (std::size_t m = static_cast<std::size_t>(n) + 1; m < observed.size(); ++m) cur.obs += observed[m];
      if (cur.expect < 5.0 && !classes.empty()) {
        classes.back().obs += cur.obs;
        classes.back().expect += cur.expect;
      } else {
        classes.push_back(cur);
      }
      break;
    }
    ++n;
  }
  if (classes.size() < 2) return 1.0;
  double chi2 = 0.0;
  for (const Cls& c : classes) chi2 += (c.obs - c.expect) * (c.obs - c.expect) / c.expect;
  const double dof = static_cast<double>(classes.size() - 1);
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), chi2));
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  if (n == 0) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  // Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-12) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

SlopeFit slope_through_origin(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("need matching samples, at least two");
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  if (sxx == 0.0) throw std::invalid_argument("degenerate regressor");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.slope * x[i];
    rss += e * e;
  }
  fit.std_error = std::sqrt(rss / static_cast<double>(x.size() - 1) / sxx);
  return fit;
}

double LogisticFit::at(double x) const { return 1.0 / (1.0 + std::exp(-(x - mid) / scale)); }

LogisticFit fit_logistic(std::span<const double> x, std::span<const std::size_t> successes,
                         std::span<const std::size_t> trials) {
  if (x.size() != successes.size() || x.size() != trials.size() || x.size() < 2)
    throw std::invalid_argument("logistic fit needs matching arrays of length >= 2");
  // Parametrize logit p = a + b x, Newton-Raphson on the binomial likelihood.
  double sum_w = 0.0, sum_wx = 0.0, sum_s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum_w += static_cast<double>(trials[i]);
    sum_wx += static_cast<double>(trials[i]) * x[i];
    sum_s += static_cast<double>(successes[i]);
  }
  const double xbar = sum_wx / sum_w;
  double xs = 0.0;
  for (double v : x) xs = std::max(xs, std::abs(v - xbar));
  if (xs == 0.0) xs = 1.0;
  // Work on standardized z = (x - xbar) / xs for conditioning.
  double a = 0.0, b = 0.0;
  const double pbar = std::clamp(sum_s / sum_w, 1e-6, 1 - 1e-6);
  a = std::log(pbar / (1 - pbar));
  LogisticFit fit;
  double h00 = 0, h01 = 0, h11 = 0;
  for (int iter = 0; iter < 100; ++iter) {
    double g0 = 0, g1 = 0;
    h00 = h01 = h11 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double z = (x[i] - xbar) / xs;
      const double p = 1.0 / (1.0 + std::exp(-(a + b * z)));
      const double n = static_cast<double>(trials[i]);
      const double resid = static_cast<double>(successes[i]) - n * p;
      const double w = n * p * (1 - p);
      g0 += resid;
      g1 += resid * z;
      h00 += w;
      h01 += w * z;
      h11 += w * z * z;
    }
    const double det = h00 * h11 - h01 * h01;
    if (!(det > 1e-12)) break;
    double da = (h11 * g0 - h01 * g1) / det;
    double db = (h00 * g1 - h01 * g0) / det;
    // Damp steps on nearly separable data.
    const double step = std::max(std::abs(da), std::abs(db));
    if (step > 5.0) {
      da *= 5.0 / step;
      db *= 5.0 / step;
    }
    a += da;
    b += db;
    if (step < 1e-10) {
      fit.converged = true;
      break;
    }
  }
  if (b <= 0.0 || !std::isfinite(a) || !std::isfinite(b)) {
    fit.converged = false;
    fit.mid = xbar;
    fit.scale = std::numeric_limits<double>::infinity();
    fit.mid_std_error = std::numeric_limits<double>::infinity();
    return fit;
  }
  // mid = xbar - a xs / b, scale = xs / b. Delta method for mid.
  fit.mid = xbar - a * xs / b;
  fit.scale = xs / b;
  const double det = h00 * h11 - h01 * h01;
  if (det > 0.0) {
    const double va = h11 / det, vb = h00 / det, cab = -h01 / det;
    const double da = -xs / b, db = a * xs / (b * b);
    fit.mid_std_error = std::sqrt(std::max(0.0, da * da * va + db * db * vb + 2 * da * db * cab));
  }
  return fit;
}

}  // namespace mscale
