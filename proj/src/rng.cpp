#include "obpm/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

namespace obpm::rng {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t seed, std::uint64_t stream_id)
    : key_(splitmix64(seed ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL))) {}

std::uint64_t Stream::bits(std::uint64_t counter) const {
  return splitmix64(key_ + counter * 0x9e3779b97f4a7c15ULL);
}

double Stream::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double Stream::uniform_pos(std::uint64_t counter) const {
  return (static_cast<double>(bits(counter) >> 11) + 1.0) * 0x1.0p-53;
}

double Stream::normal(std::uint64_t pair_counter) const {
  const double u1 = uniform_pos(2 * pair_counter);
  const double u2 = uniform(2 * pair_counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t Stream::poisson(double mean, std::uint64_t counter) const {
  if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
  if (mean == 0.0) return 0;
  const double u = uniform(counter);
  // CDF inversion with the pmf recurrence, started from the log pmf at 0 to
  // avoid underflow of exp(-mean) alone deciding the walk for large means.
  double log_p = -mean;
  double cdf = std::exp(log_p);
  std::int64_t k = 0;
  const std::int64_t k_max =
      static_cast<std::int64_t>(mean + 20.0 * std::sqrt(mean) + 100.0);
  double p = cdf;
  while (u > cdf && k < k_max) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

}  // namespace obpm::rng

namespace obpm {

void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& fn) {
  if (n <= 0) return;
  if (workers < 1) workers = 1;
  if (workers == 1 || n == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int t_count = static_cast<int>(std::min<std::int64_t>(workers, n));
  std::vector<std::thread> pool;
  pool.reserve(t_count);
  for (int t = 0; t < t_count; ++t) {
    const std::int64_t lo = n * t / t_count;
    const std::int64_t hi = n * (t + 1) / t_count;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace obpm
