#ifndef OBPM_RNG_HPP
#define OBPM_RNG_HPP

#include <cstdint>
#include <functional>

namespace obpm::rng {

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based random stream: the i-th value is a pure function of
/// (seed, stream_id, i), so any parallel schedule reproduces the same draws.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const;
  /// Uniform in (0, 1]; safe as a log argument.
  double uniform_pos(std::uint64_t counter) const;
  /// Standard normal via Box-Muller; consumes counters 2k and 2k+1.
  double normal(std::uint64_t pair_counter) const;
  /// Poisson by CDF inversion; consumes one counter. Intended for mean <= ~1e3.
  std::int64_t poisson(double mean, std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

}  // namespace obpm::rng

namespace obpm {

/// Runs fn(i) for i in [0, n) across `workers` threads in fixed index chunks.
/// Tasks must write only to their own slots; any reduction happens afterwards
/// in index order, so results do not depend on the worker count.
void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& fn);

}  // namespace obpm

#endif
