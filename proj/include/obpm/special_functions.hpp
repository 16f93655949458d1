#ifndef OBPM_SPECIAL_FUNCTIONS_HPP
#define OBPM_SPECIAL_FUNCTIONS_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace obpm::sf {

/// A signed real held as (log of magnitude, sign), usable far outside the
/// dynamic range of double. sign == 0 means the value is exactly zero and
/// log_mag is ignored.
struct LogReal {
  double log_mag = 0.0;
  int sign = 0;

  static LogReal from_value(double v);
  static LogReal from_log(double log_mag, int sign = +1);

  double value() const;
  bool is_zero() const { return sign == 0; }

  LogReal operator*(const LogReal& o) const;
  LogReal operator+(const LogReal& o) const;
  LogReal operator-(const LogReal& o) const;
};

/// ln Gamma(x) for x > 0. Throws std::domain_error otherwise.
double log_gamma(double x);

/// ln n! with a cached table for small n.
double log_factorial(std::int64_t n);

/// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a+b), a, b > 0.
double log_beta(double a, double b);

/// ln C(n, k).
double log_binomial(std::int64_t n, std::int64_t k);

/// Coefficients c_n = (2^n n!)^{-1/2} H_n(x / sqrt 2) for n = 0..n_max,
/// computed by the stable recurrence
///   c_{n+1} = (x / sqrt(n+1)) c_n - sqrt(n / (n+1)) c_{n-1}.
/// Safe for |x| <= 40, n_max <= 1000. Parity c_n(-x) = (-1)^n c_n(x) is exact.
std::vector<double> scaled_hermite_coeffs(double x, int n_max);

/// ln 1F1(a; b; z) for a > 0, b > 0, z >= 0 (all series terms positive).
/// Streaming log-sum-exp over the Kummer series; terminates once the term has
/// fallen 1e-18 below the running maximum while decreasing.
double log_kummer_1f1(double a, double b, double z);

/// ln[ e^{-mean} mean^m / m! ].
double log_poisson_pmf(std::int64_t m, double mean);

/// Fixed-order pairwise summation. Deterministic for a given input order and
/// accurate to O(log n) rounding steps.
double pairwise_sum(std::span<const double> xs);

// ---- inline LogReal ----

inline LogReal LogReal::from_value(double v) {
  if (v == 0.0) return {};
  return {std::log(std::abs(v)), v > 0 ? +1 : -1};
}

inline LogReal LogReal::from_log(double log_mag, int sign) {
  if (sign == 0) return {};
  return {log_mag, sign > 0 ? +1 : -1};
}

inline double LogReal::value() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_mag);
}

inline LogReal LogReal::operator*(const LogReal& o) const {
  if (sign == 0 || o.sign == 0) return {};
  return {log_mag + o.log_mag, sign * o.sign};
}

inline LogReal LogReal::operator+(const LogReal& o) const {
  if (sign == 0) return o;
  if (o.sign == 0) return *this;
  const bool this_hi = log_mag >= o.log_mag;
  const LogReal& hi = this_hi ? *this : o;
  const LogReal& lo = this_hi ? o : *this;
  const double d = lo.log_mag - hi.log_mag;  // <= 0
  if (sign == o.sign) return {hi.log_mag + std::log1p(std::exp(d)), hi.sign};
  const double m = -std::expm1(d);  // 1 - exp(d), in [0, 1]
  if (m == 0.0) return {};
  return {hi.log_mag + std::log(m), hi.sign};
}

inline LogReal LogReal::operator-(const LogReal& o) const {
  return *this + LogReal{o.log_mag, -o.sign};
}

}  // namespace obpm::sf

#endif
