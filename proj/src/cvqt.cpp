#include "obpm/cvqt.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

#include "obpm/rng.hpp"
#include "obpm/special_functions.hpp"

namespace obpm::cvqt {

using fock::LinearOp;
using fock::PureState;

namespace {

constexpr double kPi = std::numbers::pi;

void require_eta(double eta) {
  if (eta < 0.0 || eta >= 1.0) {
    throw std::invalid_argument(
        "eta must lie in [0, 1); eta = 1 is the ideal limit, sweep eta = 1 - eps");
  }
}

void require_single_mode(const PureState& psi, const char* who) {
  if (psi.mode_count() != 1) {
    throw std::invalid_argument(std::string(who) + ": input must be single-mode");
  }
}

// out[m] = sum_{n >= m} c^{n-m} sqrt(n!/m!) / (n-m)!  psi[n]; exact.
std::vector<cxd> apply_exp_annihilation(cxd c, const std::vector<cxd>& psi, int out_dim) {
  const int in_dim = static_cast<int>(psi.size());
  std::vector<cxd> out(out_dim, cxd{0.0, 0.0});
  for (int m = 0; m < out_dim; ++m) {
    cxd coeff = 1.0;
    cxd acc = (m < in_dim) ? psi[m] : cxd{0.0, 0.0};
    for (int n = m + 1; n < in_dim; ++n) {
      coeff *= c / static_cast<double>(n - m);
      acc += coeff *
             std::exp(0.5 * (sf::log_factorial(n) - sf::log_factorial(m))) * psi[n];
    }
    out[m] = acc;
  }
  return out;
}

// out[m] = sum_{n <= m} c^{m-n} sqrt(m!/n!) / (m-n)!  psi[n]; truncated at out_dim.
std::vector<cxd> apply_exp_creation(cxd c, const std::vector<cxd>& psi, int out_dim) {
  const int in_dim = static_cast<int>(psi.size());
  std::vector<cxd> out(out_dim, cxd{0.0, 0.0});
  for (int m = 0; m < out_dim; ++m) {
    cxd acc = (m < in_dim) ? psi[m] : cxd{0.0, 0.0};
    cxd coeff = 1.0;
    const int n_hi = std::min(m - 1, in_dim - 1);
    for (int diff = 1; diff <= m; ++diff) {
      coeff *= c / static_cast<double>(diff);
      const int n = m - diff;
      if (n > n_hi) continue;
      acc += coeff *
             std::exp(0.5 * (sf::log_factorial(m) - sf::log_factorial(n))) * psi[n];
    }
    out[m] = acc;
  }
  return out;
}

void scale_geometric(std::vector<cxd>& v, double eta) {
  double p = 1.0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    v[n] *= p;
    p *= eta;
  }
}

}  // namespace

int tms_cutoff(double eta) {
  if (eta <= 0.0) return 2;
  const int geometric =
      static_cast<int>(std::ceil(std::log(fock::kTailTolerance) / (2.0 * std::log(eta)))) + 2;
  return std::max(geometric, 12);
}

LinearOp bell_kernel_matrix(cxd gamma, double eta, double phi, int in_dim, int out_dim) {
  require_eta(eta);
  const cxd u = -eta * gamma * std::polar(1.0, phi);
  const cxd v = std::conj(gamma) * std::polar(1.0, -phi);
  LinearOp left = fock::exp_creation_op(u, out_dim);
  LinearOp right = fock::exp_annihilation_op(v, in_dim);
  // Rectangular transfer sum_n eta^n |n>_2 <n|_in.
  LinearOp mid;
  mid.out_dims = {out_dim};
  mid.in_dims = {in_dim};
  mid.entries.assign(static_cast<std::int64_t>(out_dim) * in_dim, cxd{0.0, 0.0});
  double p = 1.0;
  for (int n = 0; n < std::min(in_dim, out_dim); ++n) {
    mid.at(n, n) = p;
    p *= eta;
  }
  LinearOp k = fock::matmul(left, fock::matmul(mid, right));
  const double pref =
      std::exp(-0.5 * std::norm(gamma)) * std::sqrt((1.0 - eta * eta) / (2.0 * kPi));
  for (cxd& e : k.entries) e *= pref;
  return k;
}

TransferKernel transfer_kernel(cxd gamma, double eta, double phi, int cutoff) {
  require_eta(eta);
  const cxd u = -eta * std::conj(gamma) * std::polar(1.0, -phi);
  const cxd v = std::conj(gamma) * std::polar(1.0, -phi);
  LinearOp left = fock::exp_annihilation_op(u, cutoff);
  LinearOp mid;
  mid.out_dims = {cutoff};
  mid.in_dims = {cutoff};
  mid.entries.assign(static_cast<std::int64_t>(cutoff) * cutoff, cxd{0.0, 0.0});
  double p = 1.0;
  for (int n = 0; n < cutoff; ++n) {
    mid.at(n, n) = p;
    p *= eta;
  }
  LinearOp k = fock::matmul(left, fock::matmul(mid, fock::exp_annihilation_op(v, cutoff)));
  const double pref = std::exp(-0.5 * std::norm(gamma) * (1.0 - eta * eta)) *
                      std::sqrt((1.0 - eta * eta) / (2.0 * kPi));
  for (cxd& e : k.entries) e *= pref;
  return TransferKernel{gamma, eta, phi, std::move(k)};
}

PureState bell_kernel_apply(cxd gamma, double eta, double phi,
                            const PureState& input, int out_dim) {
  require_eta(eta);
  require_single_mode(input, "bell_kernel_apply");
  const cxd u = -eta * gamma * std::polar(1.0, phi);
  const cxd v = std::conj(gamma) * std::polar(1.0, -phi);
  std::vector<cxd> w = apply_exp_annihilation(v, input.amps, input.dims[0]);
  scale_geometric(w, eta);
  std::vector<cxd> out = apply_exp_creation(u, w, out_dim);
  const double pref =
      std::exp(-0.5 * std::norm(gamma)) * std::sqrt((1.0 - eta * eta) / (2.0 * kPi));
  PureState result = fock::make_state({out_dim});
  for (int n = 0; n < out_dim; ++n) result.amps[n] = pref * out[n];
  return result;
}

PureState transfer_kernel_apply(cxd gamma, double eta, double phi,
                                const PureState& input) {
  require_eta(eta);
  require_single_mode(input, "transfer_kernel_apply");
  const int dim = input.dims[0];
  const cxd u = -eta * std::conj(gamma) * std::polar(1.0, -phi);
  const cxd v = std::conj(gamma) * std::polar(1.0, -phi);
  std::vector<cxd> w = apply_exp_annihilation(v, input.amps, dim);
  scale_geometric(w, eta);
  std::vector<cxd> out = apply_exp_annihilation(u, w, dim);
  const double pref = std::exp(-0.5 * std::norm(gamma) * (1.0 - eta * eta)) *
                      std::sqrt((1.0 - eta * eta) / (2.0 * kPi));
  PureState result = fock::make_state({dim});
  for (int n = 0; n < dim; ++n) result.amps[n] = pref * out[n];
  return result;
}

CvqtInitial build_cvqt_initial(const PureState& input, double eta, int K) {
  require_eta(eta);
  require_single_mode(input, "build_cvqt_initial");
  const auto grid = homodyne::uniform_phase_grid(K);
  std::vector<double> weights(K, 1.0 / K);
  std::vector<std::vector<double>> phases(K);
  for (int k = 0; k < K; ++k) phases[k] = {grid[k]};
  const int pair_cutoff = tms_cutoff(eta);
  PureState in_copy = input;
  auto make = [in_copy, eta, pair_cutoff](const std::vector<double>& ph) {
    return fock::tensor(in_copy, fock::two_mode_squeezed(eta, ph[0], pair_cutoff));
  };
  homodyne::PhaseEnsemble ens(std::move(weights), std::move(phases), std::move(make));
  ens.grid_points = K;
  return CvqtInitial{input, eta, std::move(ens)};
}

BellProjection bell_projection(const CvqtInitial& initial, double x1, double x2) {
  const cxd gamma = cxd{x1, x2} / std::sqrt(2.0);
  const std::size_t K = initial.ensemble.size();
  const int din = initial.input.dims[0];
  const double spill = std::norm(gamma) * initial.eta * initial.eta;
  const int out_dim = din + fock::cutoff_for_mean_photon(spill);

  BellProjection bp;
  bp.x1 = x1;
  bp.x2 = x2;
  bp.phase_grid.resize(K);
  bp.weights.resize(K);
  bp.mode2_states.reserve(K);
  std::vector<double> contrib(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double phi = initial.ensemble.phases(k)[0];
    bp.phase_grid[k] = phi;
    bp.weights[k] = initial.ensemble.weight(k);
    PureState psi2 = bell_kernel_apply(gamma, initial.eta, phi, initial.input, out_dim);
    contrib[k] = bp.weights[k] * psi2.norm_sq();
    bp.mode2_states.push_back(std::move(psi2));
  }
  bp.density = sf::pairwise_sum(contrib);
  return bp;
}

namespace {

struct SharedResult {
  std::vector<PureState> outputs;  // normalized transfer-kernel outputs per phi
  std::vector<double> post_weights;
  double density = 0.0;
  double fidelity = 0.0;
};

SharedResult run_shared(const PureState& input, double eta, cxd gamma, int K) {
  const auto grid = homodyne::uniform_phase_grid(K);
  SharedResult r;
  r.outputs.reserve(K);
  std::vector<double> contrib(K);
  for (int k = 0; k < K; ++k) {
    PureState out = transfer_kernel_apply(gamma, eta, grid[k], input);
    contrib[k] = out.norm_sq() / K;
    r.outputs.push_back(std::move(out));
  }
  r.density = sf::pairwise_sum(contrib);
  r.post_weights.resize(K);
  std::vector<double> fid(K);
  for (int k = 0; k < K; ++k) {
    r.post_weights[k] = contrib[k] / r.density;
    const PureState normed = fock::normalized(r.outputs[k]);
    fid[k] = r.post_weights[k] * std::norm(fock::inner_product(input, normed));
    r.outputs[k] = normed;
  }
  // Exact renormalization of the posterior weights.
  const double total = sf::pairwise_sum(r.post_weights);
  for (double& w : r.post_weights) w /= total;
  r.fidelity = sf::pairwise_sum(fid) / total;
  return r;
}

}  // namespace

namespace {

void check_teleport_result(double density, double fidelity) {
  if (density < 0.0 || fidelity < 0.0 || fidelity > 1.0 + 1e-9) {
    throw std::logic_error("teleport: result outside its physical range");
  }
}

}  // namespace

TeleportOutcome teleport(const PureState& input, double eta, double x1, double x2,
                         bool share_phase, const TeleportOptions& opts) {
  require_eta(eta);
  require_single_mode(input, "teleport");
  const cxd gamma = cxd{x1, x2} / std::sqrt(2.0);
  const int K = opts.phase_samples;
  const auto grid = homodyne::uniform_phase_grid(K);

  if (share_phase) {
    SharedResult r = run_shared(input, eta, gamma, K);
    std::vector<std::vector<double>> phases(K);
    for (int k = 0; k < K; ++k) phases[k] = {grid[k]};
    auto states = std::make_shared<std::vector<PureState>>(std::move(r.outputs));
    const auto grid_copy = grid;
    auto make = [states, grid_copy](const std::vector<double>& ph) {
      for (std::size_t k = 0; k < grid_copy.size(); ++k) {
        if (grid_copy[k] == ph[0]) return (*states)[k];
      }
      throw std::logic_error("teleport output: phase not on the grid");
    };
    homodyne::PhaseEnsemble ens(std::move(r.post_weights), std::move(phases), std::move(make));
    ens.grid_points = K;
    check_teleport_result(r.density, r.fidelity);
    return TeleportOutcome{x1, x2, r.density, std::move(ens), r.fidelity};
  }

  // Unshared: Bob corrects with an independent uniform phase phi_B. The
  // output ensemble runs over (phi, phi_B); the Bell density is unchanged.
  const int KB = opts.bob_phase_samples;
  const auto bob_grid = homodyne::uniform_phase_grid(KB);
  const int din = input.dims[0];
  const double spill = std::norm(gamma) * eta * eta;
  const int dout = din + fock::cutoff_for_mean_photon(spill);

  std::vector<PureState> alice_states;  // normalized Bell-kernel outputs
  alice_states.reserve(K);
  std::vector<double> contrib(K);
  for (int k = 0; k < K; ++k) {
    PureState psi2 = bell_kernel_apply(gamma, eta, grid[k], input, dout);
    contrib[k] = psi2.norm_sq() / K;
    alice_states.push_back(fock::normalized(psi2));
  }
  const double density = sf::pairwise_sum(contrib);
  std::vector<double> post_w(K);
  for (int k = 0; k < K; ++k) post_w[k] = contrib[k] / density;
  const double total = sf::pairwise_sum(post_w);
  for (double& w : post_w) w /= total;

  // Fidelity: <psi|D(beta) v> = <D(-beta) psi | v>.
  PureState input_ext = fock::make_state({dout});
  for (int n = 0; n < din; ++n) input_ext.amps[n] = input.amps[n];
  std::vector<double> fid_terms(static_cast<std::size_t>(K) * KB);
  for (int b = 0; b < KB; ++b) {
    const cxd beta = eta * gamma * std::polar(1.0, bob_grid[b]);
    const LinearOp d_inv = fock::displacement_op(-beta, dout);
    const PureState probe = fock::apply_single_mode(d_inv, input_ext, 0);
    for (int k = 0; k < K; ++k) {
      const double f = std::norm(fock::inner_product(probe, alice_states[k]));
      fid_terms[static_cast<std::size_t>(k) * KB + b] = post_w[k] * f / KB;
    }
  }
  const double fidelity = sf::pairwise_sum(fid_terms);

  std::vector<double> weights(static_cast<std::size_t>(K) * KB);
  std::vector<std::vector<double>> phases;
  phases.reserve(weights.size());
  for (int k = 0; k < K; ++k) {
    for (int b = 0; b < KB; ++b) {
      weights[static_cast<std::size_t>(k) * KB + b] = post_w[k] / KB;
      phases.push_back({grid[k], bob_grid[b]});
    }
  }
  auto states = std::make_shared<std::vector<PureState>>(std::move(alice_states));
  const auto grid_copy = grid;
  auto make = [states, grid_copy, eta, gamma, dout](const std::vector<double>& ph) {
    for (std::size_t k = 0; k < grid_copy.size(); ++k) {
      if (grid_copy[k] == ph[0]) {
        const cxd beta = eta * gamma * std::polar(1.0, ph[1]);
        const LinearOp d = fock::displacement_op(beta, dout);
        return fock::apply_single_mode(d, (*states)[k], 0);
      }
    }
    throw std::logic_error("teleport output: phase not on the grid");
  };
  homodyne::PhaseEnsemble ens(std::move(weights), std::move(phases), std::move(make));
  ens.grid_points = K;
  check_teleport_result(density, fidelity);
  return TeleportOutcome{x1, x2, density, std::move(ens), fidelity};
}

CsvTable FidelitySweep::to_table() const {
  CsvTable t;
  t.headers = {"eta", "mean_fidelity", "std_err", "shared_flag", "samples", "seed"};
  t.columns.resize(6);
  for (const auto& r : rows) {
    t.columns[0].push_back(r.eta);
    t.columns[1].push_back(r.mean_fidelity);
    t.columns[2].push_back(r.std_err);
    t.columns[3].push_back(shared ? 1.0 : 0.0);
    t.columns[4].push_back(static_cast<double>(samples));
    t.columns[5].push_back(static_cast<double>(seed));
  }
  return t;
}

FidelitySweep fidelity_sweep(const PureState& input, const std::vector<double>& etas,
                             bool share_phase, int samples, std::uint64_t seed,
                             const TeleportOptions& opts, int workers) {
  if (etas.empty()) throw std::invalid_argument("fidelity_sweep: empty eta list");
  if (samples < 2) throw std::invalid_argument("fidelity_sweep: need >= 2 samples");
  require_single_mode(input, "fidelity_sweep");

  // Proposal spread matched to the eta = 0 Husimi envelope of the input.
  const double sigma2 = 1.0 + 2.0 * fock::mean_photon(input, 0);
  const double sigma = std::sqrt(sigma2);

  FidelitySweep sweep;
  sweep.shared = share_phase;
  sweep.samples = samples;
  sweep.seed = seed;
  for (std::size_t ei = 0; ei < etas.size(); ++ei) {
    const double eta = etas[ei];
    require_eta(eta);
    std::vector<double> w(samples), f(samples);
    rng::Stream stream(seed, ei);
    parallel_for(samples, workers, [&](std::int64_t s) {
      const double x1 = sigma * stream.normal(2 * s);
      const double x2 = sigma * stream.normal(2 * s + 1);
      const TeleportOutcome out = teleport(input, eta, x1, x2, share_phase, opts);
      const double q = std::exp(-(x1 * x1 + x2 * x2) / (2.0 * sigma2)) /
                       (2.0 * kPi * sigma2);
      w[s] = out.density / q;
      f[s] = out.fidelity;
    });
    const double wsum = sf::pairwise_sum(w);
    std::vector<double> wf(samples);
    for (int s = 0; s < samples; ++s) wf[s] = w[s] * f[s];
    const double mean = sf::pairwise_sum(wf) / wsum;
    std::vector<double> dev(samples);
    for (int s = 0; s < samples; ++s) {
      const double d = w[s] * (f[s] - mean);
      dev[s] = d * d;
    }
    const double se = std::sqrt(sf::pairwise_sum(dev)) / wsum;
    sweep.rows.push_back({eta, mean, se});
  }
  return sweep;
}

}  // namespace obpm::cvqt
