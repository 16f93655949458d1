#ifndef OBPM_TWIN_LASER_HPP
#define OBPM_TWIN_LASER_HPP

#include <cstdint>
#include <vector>

#include "obpm/distribution.hpp"

namespace obpm::twin {

/// Continuous measurement of two independent lasers interfering on a 50/50
/// beamsplitter, probed by ground-state two-level atoms crossing the output
/// modes c = (a - b)/sqrt 2 and d = (a + b)/sqrt 2 one at a time. Each
/// photoabsorption (quantum jump) lands in c with probability
/// sin^2(Delta/2) where Delta = phi_a - phi_b; atoms passing without
/// absorption damp both amplitudes as r_t = r0 e^{-R t} and leave the phase
/// correlation unchanged.
///
/// The statistics layer treats the atom stream as a continuous-time jump
/// process and neglects the extra damping a counted mode suffers during its
/// own transits (e^{-R n tau} ~ 1). Both idealizations hold in the regime
/// the validity flag checks, tau < 1/(sqrt(2 s) r0 g); time-ordering
/// corrections beyond that are out of scope.

struct ApparatusConfig {
  double r0 = 0.0;    // initial coherent amplitude, r_a = r_b = r0
  double g = 0.0;     // atom-field coupling (rad/s)
  double tau = 0.0;   // atom transit time (s)
  double t = 0.0;     // total measurement time (s)
  std::uint64_t seed = 0;

  ApparatusConfig(double r0, double g, double tau, double t, std::uint64_t seed);

  double damping_rate() const { return damping_rate_; }        // R = g^2 tau / 2
  double residual_amplitude() const;                           // r0 e^{-R t}
  double expected_jumps() const;                               // 2 r0^2 (1 - e^{-2Rt})
  /// tau < (sqrt(2 s) r0 g)^{-1} with s = ceil(expected_jumps()); violating it
  /// is a warning, not an error.
  bool transit_time_valid() const;

 private:
  double damping_rate_ = 0.0;
};

/// One trajectory outcome: ordered jump times in [0, t], channel labels,
/// counts p (mode c) and q (mode d), and the residual amplitude.
struct JumpRecord {
  std::vector<double> times;
  std::vector<std::uint8_t> channels;  // 0 = c, 1 = d
  std::int64_t p = 0;
  std::int64_t q = 0;
  double r_t = 0.0;

  std::int64_t total() const { return p + q; }
};

struct Trajectory {
  double phi_a = 0.0;
  double phi_b = 0.0;
  JumpRecord record;
};

/// Conditional probability that p of s jumps land in mode c, with the phase
/// difference integrated out:
///   P(p | s) = pi^{-1} C(s, p) B(p + 1/2, s - p + 1/2).
/// Exactly symmetric under p <-> s - p.
double jump_count_probability(std::int64_t s, std::int64_t p);

/// Normalized density of the phase difference Delta on [0, 2 pi) after
/// counting (p, q) jumps:
///   f(Delta) = sin^{2p}(Delta/2) cos^{2q}(Delta/2) / (2 B(p + 1/2, q + 1/2)).
struct PhaseDifferencePosterior {
  std::int64_t p = 0;
  std::int64_t q = 0;

  double density(double delta) const;
  double log_density(double delta) const;
  DistributionTable tabulate(int points = 512) const;  // columns delta, density

 private:
  friend PhaseDifferencePosterior phase_posterior(std::int64_t, std::int64_t);
  double log_norm_ = 0.0;  // ln(2 B(p + 1/2, q + 1/2))
};

PhaseDifferencePosterior phase_posterior(std::int64_t p, std::int64_t q);

/// Jump times carry no extra information about Delta: the likelihood
/// factorizes into a Delta-free time part and sin^{2p} cos^{2q}.
PhaseDifferencePosterior posterior_from_record(const JumpRecord& record);

/// Photon number distribution of mode c after counting (p, q) jumps, with
/// residual intensity r_t^2:
///   P_c(m) = e^{-2 r_t^2} (2 r_t^2)^m / m!
///            * B(m + p + 1/2, q + 1/2) / B(p + 1/2, q + 1/2)
///            * 1F1(q + 1/2; m + p + q + 1; 2 r_t^2),
/// assembled in log space. Columns (m, P_c, P_d); P_d is the same formula with
/// p and q interchanged. The range auto-extends until the retained mass of
/// both columns is within 1e-9 of 1.
CsvTable photon_number_distribution(std::int64_t p, std::int64_t q,
                                    double r_t_squared, std::int64_t m_max = -1);

/// Single-column helper used by tests and the tail rule.
std::vector<double> photon_number_pmf(std::int64_t p, std::int64_t q,
                                      double r_t_squared, std::int64_t m_max);

/// Monte-Carlo wave function sampling of the apparatus: per trajectory the
/// unknown phases are drawn uniformly and independently, the jump count over
/// [0, t] is Poisson with mean 2 r0^2 (1 - e^{-2Rt}), jump times follow the
/// exact inversion of that integrated rate, and each jump picks mode c with
/// probability sin^2(Delta/2). Deterministic under (seed, trajectory index)
/// for any worker count.
std::vector<Trajectory> mcwf_run(const ApparatusConfig& config,
                                 std::int64_t trajectories, int workers = 1);

/// Diagnostic hook: same sampler with both phases pinned (Delta forced).
Trajectory mcwf_single(const ApparatusConfig& config, std::int64_t index,
                       double phi_a, double phi_b);

}  // namespace obpm::twin

#endif
