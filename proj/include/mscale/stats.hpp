#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mscale {

// Welford accumulator; merge() combines in a fixed order for reproducible sums.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& o);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased
  double std_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t replicas = 0;
  std::string settings;
};

EstimateWithError summarize(std::span<const double> xs, std::string settings = {});

double poisson_pmf(double mean, long long n);
double poisson_cdf(double mean, long long n);
// Smallest n with P(N <= n) >= u; monotone in mean for fixed u.
long long poisson_quantile(double mean, double u);

// Pearson chi-square goodness of fit of integer samples against Poisson(mean);
// tail classes are pooled so every expected count is >= 5. Returns the p-value.
double chi_square_poisson_pvalue(std::span<const long long> samples, double mean);

// Kolmogorov-Smirnov distances.
double ks_distance(std::vector<double> a, std::vector<double> b);
template <class Cdf>
double ks_distance_to(std::vector<double> xs, Cdf cdf);
// Asymptotic one-sample KS p-value for statistic D on n samples.
double ks_pvalue(double d, std::size_t n);

// Slope of y = b x by least squares through the origin, with its standard error.
struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
};
SlopeFit slope_through_origin(std::span<const double> x, std::span<const double> y);

// Binomial logistic fit p(x) = 1 / (1 + exp(-(x - mid) / scale)).
struct LogisticFit {
  double mid = 0.0;
  double scale = 1.0;
  double mid_std_error = 0.0;
  bool converged = false;
  double at(double x) const;
};
LogisticFit fit_logistic(std::span<const double> x, std::span<const std::size_t> successes,
                         std::span<const std::size_t> trials);

// --- template implementation ---

template <class Cdf>
double ks_distance_to(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace mscale
