#ifndef OBPM_CVQT_HPP
#define OBPM_CVQT_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "obpm/distribution.hpp"
#include "obpm/fock.hpp"
#include "obpm/homodyne.hpp"

namespace obpm::cvqt {

using fock::cxd;

/// Continuous-variable teleportation with a phase-unknown pump.
///
/// Alice interferes the input mode with half of a two-mode squeezed pair on a
/// 50/50 beamsplitter and homodynes both output ports (quadratures theta = phi
/// and phi + pi/2). Conditioned on outcomes (x1, x2), written as
/// gamma = (x1 + i x2) / sqrt 2, the unnormalized state reaching Bob's mode is
/// a closed-form kernel applied to the input, and Bob's displacement
/// correction D(eta gamma e^{i phi}) turns it into the transfer kernel that is
/// phase independent only at eta = 1.

/// Mode-in -> mode-2 transfer operator (Bob's corrected kernel):
///   e^{-|gamma|^2 (1 - eta^2)/2} sqrt((1 - eta^2)/(2 pi))
///   exp(-eta conj(gamma) e^{-i phi} a_2) (sum_n eta^n |n><n|)
///   exp(conj(gamma) e^{-i phi} a_in).
struct TransferKernel {
  cxd gamma;
  double eta = 0.0;
  double phi = 0.0;
  fock::LinearOp matrix;
};

TransferKernel transfer_kernel(cxd gamma, double eta, double phi, int cutoff);

/// Alice-side Bell kernel (before Bob's correction):
///   e^{-|gamma|^2 / 2} sqrt((1 - eta^2)/(2 pi))
///   exp(-eta gamma e^{i phi} a_2^dag) (sum_n eta^n |n><n|)
///   exp(conj(gamma) e^{-i phi} a_in).
/// Composing with D(eta gamma e^{i phi}) yields the transfer kernel.
fock::LinearOp bell_kernel_matrix(cxd gamma, double eta, double phi,
                                  int in_dim, int out_dim);

/// Applies the Bell kernel to a single-mode input without materializing the
/// matrix; out_dim controls the creation-exponential headroom.
fock::PureState bell_kernel_apply(cxd gamma, double eta, double phi,
                                  const fock::PureState& input, int out_dim);

/// Applies the transfer kernel; exact on the input's support (all factors are
/// lowering or diagonal), so out dim equals the input dim.
fock::PureState transfer_kernel_apply(cxd gamma, double eta, double phi,
                                      const fock::PureState& input);

/// The pre-measurement state: phase ensemble over phi of
/// |input>_in (x) |eta e^{i 2 phi}>_{1,2}. Members materialize lazily; the
/// closed-form pipeline never needs them.
struct CvqtInitial {
  fock::PureState input;
  double eta = 0.0;
  homodyne::PhaseEnsemble ensemble;
};

CvqtInitial build_cvqt_initial(const fock::PureState& input, double eta, int K);

/// Two-mode-squeezed cutoff that keeps the geometric tail below the fock
/// tail tolerance.
int tms_cutoff(double eta);

struct BellProjection {
  double x1 = 0.0;
  double x2 = 0.0;
  double density = 0.0;                        // P(x1, x2)
  std::vector<double> phase_grid;              // pump phase samples
  std::vector<double> weights;                 // prior phase weights
  std::vector<fock::PureState> mode2_states;   // unnormalized kernel outputs per phi
};

/// Alice's double homodyne at outcome (x1, x2): beamsplitter plus projection
/// onto <x1, phi| <x2, phi + pi/2|, evaluated through the closed-form kernel.
/// density is the phase-averaged P(x1, x2) with total mass 1 over dx1 dx2.
BellProjection bell_projection(const CvqtInitial& initial, double x1, double x2);

struct TeleportOptions {
  int phase_samples = 64;      // pump phase grid K
  int bob_phase_samples = 32;  // Bob's independent grid when the phase is not shared
};

struct TeleportOutcome {
  double x1 = 0.0;
  double x2 = 0.0;
  double density = 0.0;
  homodyne::PhaseEnsemble output;  // mode-2 ensemble after Bob's correction
  double fidelity = 0.0;           // <psi_in| rho_2 |psi_in>
};

/// Runs the full pipeline at a fixed Bell outcome. With share_phase, Bob's
/// displacement uses the matching pump phase per ensemble member; otherwise he
/// applies D(eta gamma e^{i phi_B}) at an independent uniform phi_B, which
/// distorts the reconstruction at eta < 1.
TeleportOutcome teleport(const fock::PureState& input, double eta, double x1,
                         double x2, bool share_phase,
                         const TeleportOptions& opts = {});

struct FidelityRow {
  double eta = 0.0;
  double mean_fidelity = 0.0;
  double std_err = 0.0;
};

struct FidelitySweep {
  std::vector<FidelityRow> rows;
  bool shared = true;
  int samples = 0;
  std::uint64_t seed = 0;

  CsvTable to_table() const;  // columns eta, mean_fidelity, std_err, shared_flag, samples, seed
};

/// Outcome-averaged fidelity per eta. Outcomes (x1, x2) are importance sampled
/// from a Gaussian proposal matched to the eta = 0 Husimi spread and
/// reweighted by the true density; deterministic under the seed for any
/// worker count.
FidelitySweep fidelity_sweep(const fock::PureState& input,
                             const std::vector<double>& etas, bool share_phase,
                             int samples, std::uint64_t seed,
                             const TeleportOptions& opts = {}, int workers = 1);

}  // namespace obpm::cvqt

#endif
