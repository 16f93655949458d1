// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerance and runtime budget in code.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "obpm/cli.hpp"
#include "obpm/cvqt.hpp"
#include "obpm/distribution.hpp"
#include "obpm/fock.hpp"
#include "obpm/homodyne.hpp"
#include "obpm/rng.hpp"
#include "obpm/special_functions.hpp"
#include "obpm/twin_laser.hpp"
#include "oracles.hpp"

using namespace obpm;
using fock::cxd;
using fock::PureState;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

template <typename Fn>
void criterion(int id, const char* name, double budget_seconds, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = fn();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_budget = seconds < budget_seconds;
  const bool pass = out.pass && in_budget;
  if (!pass) ++failures;
  std::printf("[%2d] %-58s %s (%s; %.2f s / budget %.0f s)\n", id, name,
              pass ? "PASS" : "FAIL", out.detail.c_str(), seconds, budget_seconds);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

twin::ApparatusConfig jump_config(double mean_jumps, std::uint64_t seed) {
  const double r0 = std::sqrt(50.0);
  const double g = 1.0e4;
  const double tau = 1.0e-6;  // R = 50
  const double t = std::log(1.0 / (1.0 - mean_jumps / 100.0)) / 100.0;
  return twin::ApparatusConfig(r0, g, tau, t, seed);
}

Outcome fig2_caption() {
  const double edge =
      twin::jump_count_probability(100, 0) + twin::jump_count_probability(100, 100);
  return {std::abs(edge - 0.113) <= 0.001, "P(0)+P(100) = " + fmt(edge)};
}

Outcome photon_distribution_vs_quadrature() {
  rng::Stream stream(7110, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::int64_t p = static_cast<std::int64_t>(stream.uniform(3 * trial) * 21.0);
    const std::int64_t q = static_cast<std::int64_t>(stream.uniform(3 * trial + 1) * 21.0);
    const double rt2 = 50.0 * stream.uniform(3 * trial + 2);
    const std::int64_t m_max = static_cast<std::int64_t>(
        std::ceil(2.0 * rt2 + 10.0 * std::sqrt(2.0 * rt2 + 1.0) + 30.0));
    const auto table = twin::photon_number_distribution(p, q, rt2, m_max);
    const auto oracle = oracles::poisson_mixture_pmf(p, q, rt2, m_max, 2048);
    for (std::int64_t m = 0; m <= m_max; ++m) {
      worst = std::max(worst, std::abs(table.columns[1][m] - oracle[m]));
    }
  }
  if (worst >= 1e-8) return {false, "per-entry deviation " + fmt(worst)};

  // Figure-scale corner: relative agreement at the peak.
  const auto table = twin::photon_number_distribution(100, 0, 1000.0);
  const auto& pc = table.columns[1];
  std::size_t peak = 0;
  for (std::size_t m = 0; m < pc.size(); ++m) {
    if (pc[m] > pc[peak]) peak = m;
  }
  const auto oracle =
      oracles::poisson_mixture_pmf(100, 0, 1000.0, static_cast<std::int64_t>(peak), 8192);
  const double rel = std::abs(pc[peak] - oracle[peak]) / oracle[peak];
  return {rel < 1e-6,
          "entries " + fmt(worst) + ", peak rel " + fmt(rel) + " at m = " +
              std::to_string(peak)};
}

Outcome mcwf_consistency() {
  // Conditional p | s = 20 against the closed form at the desk configuration.
  const auto cfg_a = jump_config(20.0, 12);
  const auto trajs_a = twin::mcwf_run(cfg_a, 100000);
  std::vector<double> emp(21, 0.0);
  std::int64_t total = 0;
  for (const auto& t : trajs_a) {
    if (t.record.total() == 20) {
      ++emp[t.record.p];
      ++total;
    }
  }
  std::vector<double> expect(21);
  for (int p = 0; p <= 20; ++p) {
    emp[p] /= total;
    expect[p] = twin::jump_count_probability(20, p);
  }
  const double tv_counts = oracles::tv_distance(emp, expect);
  if (tv_counts >= 0.02) {
    return {false, "p|s=20 TV " + fmt(tv_counts) + " (n = " + std::to_string(total) + ")"};
  }

  // Phase-difference posterior conditioned on (p, q) = (2, 2) at mean 4.
  const auto cfg_b = jump_config(4.0, 12);
  const auto trajs_b = twin::mcwf_run(cfg_b, 100000);
  const auto post = twin::phase_posterior(2, 2);
  const int bins = 8;
  std::vector<double> emp_d(bins, 0.0);
  std::int64_t total_d = 0;
  for (const auto& t : trajs_b) {
    if (t.record.p == 2 && t.record.q == 2) {
      double delta = std::fmod(t.phi_a - t.phi_b, 2.0 * kPi);
      if (delta < 0.0) delta += 2.0 * kPi;
      ++emp_d[static_cast<int>(delta / (2.0 * kPi / bins))];
      ++total_d;
    }
  }
  std::vector<double> expect_d(bins, 0.0);
  const int fine = 1 << 13;
  for (int i = 0; i < fine; ++i) {
    const double d = 2.0 * kPi * (i + 0.5) / fine;
    expect_d[static_cast<int>(d / (2.0 * kPi / bins))] +=
        post.density(d) * (2.0 * kPi / fine);
  }
  for (int b = 0; b < bins; ++b) emp_d[b] /= total_d;
  const double tv_delta = oracles::tv_distance(emp_d, expect_d);
  return {tv_delta < 0.03, "p|s=20 TV " + fmt(tv_counts) + ", delta TV " + fmt(tv_delta) +
                               " (n = " + std::to_string(total_d) + ")"};
}

Outcome bell_kernel_vs_brute_force() {
  rng::Stream stream(880, 1);
  const PureState inputs[3] = {
      fock::basis_state({20}, {0}),
      fock::basis_state({20}, {1}),
      fock::coherent_state(1.0, 0.25, 36),
  };
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const PureState& input = inputs[trial % 3];
    const double eta = 0.7 * stream.uniform(10 * trial);
    const double phi = 2.0 * kPi * stream.uniform(10 * trial + 1);
    // |gamma| <= 2, i.e. x1^2 + x2^2 <= 8.
    const double radius = 2.0 * std::sqrt(stream.uniform(10 * trial + 2));
    const double angle = 2.0 * kPi * stream.uniform(10 * trial + 3);
    const double x1 = std::sqrt(2.0) * radius * std::cos(angle);
    const double x2 = std::sqrt(2.0) * radius * std::sin(angle);

    const int pair_cutoff = std::max(cvqt::tms_cutoff(eta), input.dims[0] + 12);
    const PureState brute =
        oracles::brute_force_bell(input, eta, phi, x1, x2, pair_cutoff);
    const cxd gamma = cxd{x1, x2} / std::sqrt(2.0);
    const PureState closed =
        cvqt::bell_kernel_apply(gamma, eta, phi, input, pair_cutoff);

    double num = 0.0, den = 0.0;
    for (int m = 0; m < pair_cutoff; ++m) {
      num += std::norm(closed.amps[m] - brute.amps[m]);
      den += std::norm(brute.amps[m]);
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  return {worst < 1e-6, "worst relative error " + fmt(worst) + " over 20 cases"};
}

Outcome displacement_link() {
  double worst = 0.0;
  const int cutoff = 25;
  const int big = 64;
  for (auto [gx, gy, eta, phi] :
       std::vector<std::tuple<double, double, double, double>>{
           {0.8, 0.5, 0.6, 0.9}, {-1.1, 0.3, 0.4, 2.2}, {0.2, -0.9, 0.7, 5.1}}) {
    const cxd gamma{gx, gy};
    const fock::LinearOp bell = cvqt::bell_kernel_matrix(gamma, eta, phi, cutoff, big);
    const fock::LinearOp d =
        fock::displacement_op(eta * gamma * std::polar(1.0, phi), big);
    const fock::LinearOp lhs = fock::matmul(d, bell);
    const auto tk = cvqt::transfer_kernel(gamma, eta, phi, big);
    for (int m = 0; m < cutoff; ++m) {
      for (int n = 0; n < cutoff; ++n) {
        worst = std::max(worst, std::abs(lhs.at(m, n) - tk.matrix.at(m, n)));
      }
    }
  }
  return {worst < 1e-8, "worst entry deviation " + fmt(worst)};
}

Outcome squeezed_light_homodyne() {
  const double s = 0.8;
  const int cutoff = 120;
  const auto grid = linspace(-13.0, 13.0, 1041);
  const double varphi = 0.0;

  const auto prior = homodyne::squeezed_pump_prior(s, 64, cutoff);
  double spread = 0.0;
  for (double x : {-3.0, -0.7, 0.0, 1.1, 2.9}) {
    const auto dens = homodyne::per_phase_density(prior, 0, varphi, x);
    double lo = dens[0], hi = dens[0];
    for (double d : dens) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    spread = std::max(spread, hi - lo);
  }
  if (spread >= 1e-9) return {false, "phase spread " + fmt(spread)};

  const DistributionTable table =
      homodyne::squeezed_light_experiment(s, varphi, grid, 64, cutoff);
  const PureState sv = fock::squeezed_vacuum(s, 0.0, cutoff);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const PureState bra = fock::quadrature_state(grid[i], varphi, cutoff);
    const double expect = std::norm(fock::inner_product(bra, sv));
    worst = std::max(worst, std::abs(table.densities[i] - expect));
  }
  if (worst >= 1e-8) return {false, "pointwise deviation " + fmt(worst)};

  const DistributionTable anti =
      homodyne::squeezed_light_experiment(s, varphi + kPi / 2.0, grid, 64, cutoff);
  const double product = homodyne::grid_moments(table).variance *
                         homodyne::grid_moments(anti).variance;
  return {std::abs(product - 1.0) < 1e-4,
          "spread " + fmt(spread) + ", pointwise " + fmt(worst) + ", var product " +
              fmt(product)};
}

Outcome phase_covariance_identity() {
  rng::Stream stream(5150, 2);
  const int cutoff = 120;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double x = 8.0 * stream.uniform(4 * trial) - 4.0;
    const double theta = 2.0 * kPi * stream.uniform(4 * trial + 1);
    const double varphi = 2.0 * kPi * stream.uniform(4 * trial + 2);
    const double s = 1.2 * stream.uniform(4 * trial + 3);
    const cxd lhs = fock::inner_product(
        fock::quadrature_state(x, theta, cutoff),
        fock::squeezed_vacuum(s, 2.0 * (theta - varphi), cutoff));
    const cxd rhs = fock::inner_product(fock::quadrature_state(x, varphi, cutoff),
                                        fock::squeezed_vacuum(s, 0.0, cutoff));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return {worst < 1e-10, "worst deviation " + fmt(worst) + " over 50 tuples"};
}

Outcome bhd_residual_slope() {
  const double theta = 0.6;
  const int sig_cutoff = 32;
  const PureState psi = fock::squeezed_vacuum(0.5, 0.0, sig_cutoff);
  const std::vector<double> rs = {2.0, 4.0, 8.0};
  std::vector<double> residuals;
  for (double r : rs) {
    const int lo_cutoff = fock::cutoff_for_mean_photon(r * r);
    const PureState lo = fock::coherent_state(r, theta, lo_cutoff);
    const PureState both = fock::tensor(lo, psi);
    PureState term1 = fock::apply_single_mode(fock::creation_op(lo_cutoff), both, 0);
    term1 = fock::apply_single_mode(fock::annihilation_op(sig_cutoff), term1, 1);
    PureState term2 = fock::apply_single_mode(fock::annihilation_op(lo_cutoff), both, 0);
    term2 = fock::apply_single_mode(fock::creation_op(sig_cutoff), term2, 1);
    const PureState xs =
        fock::apply_single_mode(fock::quadrature_op(theta, sig_cutoff), both, 1);
    double res = 0.0;
    for (std::int64_t i = 0; i < both.size(); ++i) {
      res += std::norm(term1.amps[i] + term2.amps[i] - r * xs.amps[i]);
    }
    const PureState xpsi =
        fock::apply_single_mode(fock::quadrature_op(theta, sig_cutoff), psi, 0);
    residuals.push_back(std::sqrt(res) / (r * xpsi.norm()));
  }
  const double slope = oracles::fit_loglog_slope(rs, residuals);
  return {std::abs(slope + 1.0) < 0.1, "fitted slope " + fmt(slope)};
}

Outcome teleport_behavior() {
  const PureState input = fock::coherent_state(1.0, 0.0, 36);
  const std::vector<double> etas = {0.0, 0.3, 0.6, 0.9};
  const auto shared = cvqt::fidelity_sweep(input, etas, true, 200, 17, {}, 1);

  const double eta0_gap =
      std::abs(shared.rows[0].mean_fidelity - std::exp(-1.0));
  if (eta0_gap > 2.0 * shared.rows[0].std_err + 1e-9) {
    return {false, "eta=0 fidelity off by " + fmt(eta0_gap)};
  }
  for (std::size_t i = 1; i < shared.rows.size(); ++i) {
    const double step =
        shared.rows[i].mean_fidelity - shared.rows[i - 1].mean_fidelity;
    const double allowed = shared.rows[i].std_err + shared.rows[i - 1].std_err;
    if (step <= -allowed) {
      return {false, "fidelity step down " + fmt(step) + " at eta = " +
                         fmt(shared.rows[i].eta)};
    }
  }
  const auto unshared = cvqt::fidelity_sweep(input, {0.9}, false, 200, 17, {}, 1);
  const double gap = shared.rows[3].mean_fidelity - unshared.rows[0].mean_fidelity;
  return {gap > 0.1, "shared 0.9 fid " + fmt(shared.rows[3].mean_fidelity) +
                         ", unshared " + fmt(unshared.rows[0].mean_fidelity) +
                         ", gap " + fmt(gap)};
}

Outcome normalizations() {
  for (std::int64_t s = 0; s <= 200; ++s) {
    std::vector<double> pmf(s + 1);
    for (std::int64_t p = 0; p <= s; ++p) pmf[p] = twin::jump_count_probability(s, p);
    if (std::abs(sf::pairwise_sum(pmf) - 1.0) > 1e-10) {
      return {false, "jump-count normalization broke at s = " + std::to_string(s)};
    }
  }

  double worst_mass = 0.0;
  for (auto [p, q, rt2] : std::vector<std::tuple<int, int, double>>{
           {100, 0, 1000.0}, {5, 3, 40.0}, {0, 0, 12.0}}) {
    const auto table = twin::photon_number_distribution(p, q, rt2);
    worst_mass = std::max(worst_mass,
                          std::abs(sf::pairwise_sum(table.columns[1]) - 1.0));
  }
  if (worst_mass > 1e-9) return {false, "photon mass deviation " + fmt(worst_mass)};

  double worst_mean = 0.0;
  for (auto [p, q, rt2] : std::vector<std::tuple<int, int, double>>{
           {3, 5, 30.0}, {12, 1, 45.0}, {0, 0, 8.0}}) {
    const auto table = twin::photon_number_distribution(p, q, rt2);
    double mc = 0.0, md = 0.0;
    for (std::size_t m = 0; m < table.columns[1].size(); ++m) {
      mc += m * table.columns[1][m];
      md += m * table.columns[2][m];
    }
    worst_mean = std::max(worst_mean, std::abs(mc + md - 2.0 * rt2) / (2.0 * rt2));
  }
  if (worst_mean > 1e-6) return {false, "mean-photon deviation " + fmt(worst_mean)};

  const double bh = oracles::bh_identity_worst(std::polar(0.8, 0.5),
                                               std::polar(0.7, -1.1), 20, 72);
  return {bh < 1e-8, "masses " + fmt(worst_mass) + ", mean-photon " + fmt(worst_mean) +
                         ", commutation identity " + fmt(bh)};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "obpm_acceptance_det";
  fs::remove_all(root);
  fs::create_directories(root);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  std::istringstream jcfg_src("trajectories = 100000\nseed = 12\n");
  const KeyValueConfig jcfg = KeyValueConfig::parse_stream(jcfg_src, "<acceptance>");
  cli::CommonOptions j1{(root / "j1").string(), 1, std::nullopt};
  cli::CommonOptions j8{(root / "j8").string(), 8, std::nullopt};
  const int rj1 = cli::cmd_jumps(jcfg, j1);
  const int rj8 = cli::cmd_jumps(jcfg, j8);
  if (rj1 != cli::kExitOk || rj8 != cli::kExitOk) {
    return {false, "cmd_jumps exit codes " + std::to_string(rj1) + "/" +
                       std::to_string(rj8)};
  }
  for (const char* name : {"trajectories.csv", "pcond_hist.csv", "posterior.csv"}) {
    if (slurp(root / "j1" / name) != slurp(root / "j8" / name)) {
      return {false, std::string("cmd_jumps differs in ") + name};
    }
  }

  std::istringstream tcfg_src(
      "input = coherent\ninput_r = 1\netas = 0, 0.45, 0.9\nsamples = 64\nseed = 6\n");
  const KeyValueConfig tcfg = KeyValueConfig::parse_stream(tcfg_src, "<acceptance>");
  cli::CommonOptions t1{(root / "t1").string(), 1, std::nullopt};
  cli::CommonOptions t8{(root / "t8").string(), 8, std::nullopt};
  if (cli::cmd_teleport(tcfg, t1) != cli::kExitOk ||
      cli::cmd_teleport(tcfg, t8) != cli::kExitOk) {
    return {false, "cmd_teleport failed"};
  }
  if (slurp(root / "t1" / "fidelity.csv") != slurp(root / "t8" / "fidelity.csv")) {
    return {false, "cmd_teleport differs in fidelity.csv"};
  }
  return {true, "jumps + teleport byte-identical for workers {1, 8}"};
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion(1, "two-edge jump probability at s = 100 (0.113 +- 0.001)", 1.0,
            fig2_caption);
  criterion(2, "photon distribution vs Poisson-mixture quadrature", 10.0,
            photon_distribution_vs_quadrature);
  criterion(3, "MCWF counts and phase posterior vs closed forms", 120.0,
            mcwf_consistency);
  criterion(4, "Bell kernel vs brute-force three-mode contraction", 60.0,
            bell_kernel_vs_brute_force);
  criterion(5, "displacement link between Bell and transfer kernels", 10.0,
            displacement_link);
  criterion(6, "squeezed-light homodyne distribution", 60.0, squeezed_light_homodyne);
  criterion(7, "phase covariance identity of squeezed-vacuum overlaps", 30.0,
            phase_covariance_identity);
  criterion(8, "BHD observable residual slope -1 in the LO amplitude", 30.0,
            bhd_residual_slope);
  criterion(9, "teleportation fidelity: monotonicity and the shared-phase gap",
            300.0, teleport_behavior);
  criterion(10, "normalizations and the boson commutation identity", 60.0,
            normalizations);
  criterion(11, "worker-count determinism of jumps and teleport CSVs", 120.0,
            determinism);

  if (failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criterion(s) failed\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
