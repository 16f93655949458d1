#ifndef OBPM_HOMODYNE_HPP
#define OBPM_HOMODYNE_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "obpm/distribution.hpp"
#include "obpm/fock.hpp"

namespace obpm::homodyne {

/// Quadrature convention used throughout: X(theta) = a e^{-i theta} +
/// a^dag e^{i theta}, so the vacuum has unit quadrature variance and the
/// vacuum homodyne density is (2 pi)^{-1/2} e^{-x^2/2}.
///
/// The local oscillator is a laser whose phase phi is completely unknown; it
/// never appears as an explicit mode. Its radial and angular projection
/// integrals are collapsed analytically through the coherent-state
/// orthogonality approximation (exact in the strong-LO limit), which leaves a
/// uniform average over the unknown pump phase. That average is what
/// PhaseEnsemble represents.
///
/// Only coherent LO states admit this treatment: number states are never
/// approximate eigenstates of the difference-current observable, however
/// large n gets, because |n> stays rigidly orthogonal to |n - 1>.
///
/// The raw photocurrent difference measures r * x with r the LO amplitude;
/// r is measurable beforehand, so outcomes are reported directly as x.

/// K uniformly spaced phases on [0, 2 pi). K must be a power of two >= 16 so
/// that convergence can be probed by doubling.
std::vector<double> uniform_phase_grid(int K);

/// A density operator that is a weighted mixture of pure states indexed by
/// sampled unknown phases. Members are materialized on demand from the stored
/// phases; the object itself is immutable.
class PhaseEnsemble {
 public:
  using Generator = std::function<fock::PureState(const std::vector<double>&)>;

  PhaseEnsemble(std::vector<double> weights,
                std::vector<std::vector<double>> phases, Generator make);

  std::size_t size() const { return weights_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& phases(std::size_t i) const { return phases_[i]; }
  fock::PureState member(std::size_t i) const { return make_(phases_[i]); }
  int phase_axes() const;

  /// Amplitude metadata recorded by two-laser priors (coherent radius r0).
  std::optional<double> source_amplitude;
  /// Phase samples per axis, recorded by grid-based builders.
  std::optional<int> grid_points;

 private:
  std::vector<double> weights_;
  std::vector<std::vector<double>> phases_;
  Generator make_;
};

/// Uniform pump-phase mixture of squeezed vacua |0, s e^{i 2 phi}> (the pump
/// phase enters doubled through second harmonic generation).
PhaseEnsemble squeezed_pump_prior(double s, int K, int cutoff);

/// Phase-independent vacuum prior (useful as the trivial check).
PhaseEnsemble vacuum_prior(int K, int cutoff);

/// Double-phase mixture of two independent lasers
/// |r0 e^{i phi_a}>_a |r0 e^{i phi_b}>_b over a K x K grid.
PhaseEnsemble two_laser_prior(double r0, int K, int cutoff);

struct HomodyneOutcome {
  double x = 0.0;
  double probability_density = 0.0;
  PhaseEnsemble posterior;
};

/// Outcome density of balanced homodyne detection on a phase ensemble:
///   P(x) = sum_phi w_phi |<x, theta(phi)|psi_phi>|^2,  theta(phi) = phi + offset.
/// Members must be single-mode signal states. The phi sum uses fixed-order
/// pairwise summation, so results are independent of any parallel schedule.
DistributionTable obpm_measure(const PhaseEnsemble& prior, int signal_mode,
                               double lo_phase_offset,
                               std::span<const double> x_grid);

/// Per-member densities |<x, theta(phi)|psi_phi>|^2 at a single point, in
/// member order. Used for phase-independence diagnostics.
std::vector<double> per_phase_density(const PhaseEnsemble& prior, int signal_mode,
                                      double lo_phase_offset, double x);

/// Post-measurement ensemble for outcome x: each member collapses to the
/// (truncation-normalized) quadrature state |x, theta(phi)>, reweighted by its
/// overlap with the prior member.
HomodyneOutcome obpm_posterior(const PhaseEnsemble& prior, int signal_mode,
                               double lo_phase_offset, double x);

/// Homodyne distribution of the squeezed light generation scheme: LO phase
/// phi + varphi, squeezed-vacuum phase 2 phi, averaged over the unknown pump
/// phase phi. The result is phase covariant, P(x) = |<x, varphi|0, s>|^2;
/// construction asserts the phi-independence to 1e-9.
DistributionTable squeezed_light_experiment(double s, double varphi,
                                            std::span<const double> x_grid,
                                            int K = 64, int cutoff = 120);

/// Post-measurement ensemble of BHD on two independent lasers given the
/// cosine of the phase difference: two equal-weight branches at
/// Delta = +-arccos(cos_outcome), each smeared uniformly over the global
/// phase. BHD cannot distinguish the sign of the phase difference.
PhaseEnsemble twin_laser_bhd(const PhaseEnsemble& prior, double cos_outcome);

/// Mean and variance of a gridded density by trapezoid quadrature.
struct GridMoments {
  double mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};
GridMoments grid_moments(const DistributionTable& table);

}  // namespace obpm::homodyne

#endif
