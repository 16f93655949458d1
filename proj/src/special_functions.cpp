#include "obpm/special_functions.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace obpm::sf {

double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("log_gamma: argument must be positive, got " +
                            std::to_string(x));
  }
  return std::lgamma(x);
}

double log_factorial(std::int64_t n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  static const std::vector<double> table = [] {
    std::vector<double> t(4096);
    t[0] = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) {
      t[k] = t[k - 1] + std::log(static_cast<double>(k));
    }
    return t;
  }();
  if (static_cast<std::size_t>(n) < table.size()) return table[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("log_beta: arguments must be positive");
  }
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double log_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) throw std::domain_error("log_binomial: need 0 <= k <= n");
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

std::vector<double> scaled_hermite_coeffs(double x, int n_max) {
  if (n_max < 1) throw std::invalid_argument("scaled_hermite_coeffs: n_max >= 1");
  std::vector<double> c(static_cast<std::size_t>(n_max) + 1);
  c[0] = 1.0;
  c[1] = x;
  for (int n = 1; n < n_max; ++n) {
    c[n + 1] = (x / std::sqrt(n + 1.0)) * c[n] -
               std::sqrt(n / (n + 1.0)) * c[n - 1];
  }
  return c;
}

namespace {

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

double log_kummer_1f1(double a, double b, double z) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("log_kummer_1f1: a and b must be positive");
  }
  if (z < 0.0) throw std::domain_error("log_kummer_1f1: z must be >= 0");
  if (z == 0.0) return 0.0;

  // Term ratio T_{k+1} / T_k of the all-positive Kummer series.
  const auto ratio = [a, b, z](std::int64_t k) {
    return (a + k) * z / ((b + k) * (k + 1.0));
  };

  // Locate the largest term, then accumulate the series scaled so the peak
  // term is 1. This keeps every floating step near unit magnitude; the log of
  // the peak term is a pairwise sum of log ratios rather than a difference of
  // large log-gammas, which matters for contiguous-relation cancellations.
  std::int64_t k_peak = 0;
  while (ratio(k_peak) >= 1.0) {
    ++k_peak;
    if (k_peak > 100000000) {
      throw std::runtime_error("log_kummer_1f1: series failed to converge");
    }
  }
  double log_peak = 0.0;
  if (k_peak > 0) {
    std::vector<double> log_ratios(k_peak);
    for (std::int64_t k = 0; k < k_peak; ++k) log_ratios[k] = std::log(ratio(k));
    log_peak = pairwise_sum(log_ratios);
  }

  constexpr double kCut = 1e-20;
  KahanSum acc;
  acc.add(1.0);  // the peak term itself
  double t = 1.0;
  for (std::int64_t k = k_peak; t >= kCut; ++k) {
    t *= ratio(k);
    acc.add(t);
  }
  t = 1.0;
  for (std::int64_t k = k_peak - 1; k >= 0; --k) {
    t /= ratio(k);
    if (t < kCut) break;
    acc.add(t);
  }
  return log_peak + std::log(acc.sum);
}

double log_poisson_pmf(std::int64_t m, double mean) {
  if (m < 0) throw std::domain_error("log_poisson_pmf: negative count");
  if (mean < 0.0) throw std::domain_error("log_poisson_pmf: negative mean");
  if (mean == 0.0) {
    return m == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return m * std::log(mean) - mean - log_factorial(m);
}

namespace {
double pairwise_sum_impl(const double* xs, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += xs[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_impl(xs, half) + pairwise_sum_impl(xs + half, n - half);
}
}  // namespace

double pairwise_sum(std::span<const double> xs) {
  return pairwise_sum_impl(xs.data(), xs.size());
}

}  // namespace obpm::sf
