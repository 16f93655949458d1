#include "obpm/twin_laser.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "obpm/rng.hpp"
#include "obpm/special_functions.hpp"

namespace obpm::twin {

namespace {
constexpr double kPi = std::numbers::pi;
}

ApparatusConfig::ApparatusConfig(double r0_in, double g_in, double tau_in,
                                 double t_in, std::uint64_t seed_in)
    : r0(r0_in), g(g_in), tau(tau_in), t(t_in), seed(seed_in) {
  if (r0 < 0.0 || g < 0.0 || tau < 0.0 || t < 0.0) {
    throw std::invalid_argument("ApparatusConfig: parameters must be >= 0");
  }
  damping_rate_ = 0.5 * g * g * tau;
}

double ApparatusConfig::residual_amplitude() const {
  return r0 * std::exp(-damping_rate_ * t);
}

double ApparatusConfig::expected_jumps() const {
  return 2.0 * r0 * r0 * (-std::expm1(-2.0 * damping_rate_ * t));
}

bool ApparatusConfig::transit_time_valid() const {
  const double s = std::ceil(expected_jumps());
  if (s <= 0.0 || r0 == 0.0 || g == 0.0) return true;
  return tau < 1.0 / (std::sqrt(2.0 * s) * r0 * g);
}

double jump_count_probability(std::int64_t s, std::int64_t p) {
  if (s < 0 || p < 0 || p > s) {
    throw std::invalid_argument("jump_count_probability: need 0 <= p <= s");
  }
  // Evaluated with the counts in canonical order so the p <-> s - p symmetry
  // is exact to the last bit.
  const std::int64_t lo = std::min(p, s - p);
  const std::int64_t hi = s - lo;
  const double log_val = sf::log_binomial(s, lo) + sf::log_beta(lo + 0.5, hi + 0.5) -
                         std::log(kPi);
  return std::exp(log_val);
}

PhaseDifferencePosterior phase_posterior(std::int64_t p, std::int64_t q) {
  if (p < 0 || q < 0) throw std::invalid_argument("phase_posterior: negative counts");
  PhaseDifferencePosterior post;
  post.p = p;
  post.q = q;
  post.log_norm_ = std::log(2.0) + sf::log_beta(p + 0.5, q + 0.5);
  return post;
}

double PhaseDifferencePosterior::log_density(double delta) const {
  const double s = std::abs(std::sin(0.5 * delta));
  const double c = std::abs(std::cos(0.5 * delta));
  double acc = -log_norm_;
  if (p > 0) {
    if (s == 0.0) return -std::numeric_limits<double>::infinity();
    acc += 2.0 * p * std::log(s);
  }
  if (q > 0) {
    if (c == 0.0) return -std::numeric_limits<double>::infinity();
    acc += 2.0 * q * std::log(c);
  }
  return acc;
}

double PhaseDifferencePosterior::density(double delta) const {
  return std::exp(log_density(delta));
}

DistributionTable PhaseDifferencePosterior::tabulate(int points) const {
  if (points < 2) throw std::invalid_argument("tabulate: need >= 2 points");
  DistributionTable t;
  t.value_label = "delta";
  t.densities.resize(points);
  t.values.resize(points);
  for (int i = 0; i < points; ++i) {
    t.values[i] = 2.0 * kPi * i / points;
    t.densities[i] = density(t.values[i]);
  }
  return t;
}

PhaseDifferencePosterior posterior_from_record(const JumpRecord& record) {
  return phase_posterior(record.p, record.q);
}

namespace {

double log_pc_entry(std::int64_t m, std::int64_t p, std::int64_t q, double z,
                    double log_beta_pq) {
  // z = 2 r_t^2.
  double acc = sf::log_poisson_pmf(m, z);
  acc += sf::log_beta(m + p + 0.5, q + 0.5) - log_beta_pq;
  acc += sf::log_kummer_1f1(q + 0.5, static_cast<double>(m + p + q + 1), z);
  return acc;
}

}  // namespace

std::vector<double> photon_number_pmf(std::int64_t p, std::int64_t q,
                                      double r_t_squared, std::int64_t m_max) {
  if (p < 0 || q < 0) throw std::invalid_argument("photon_number_pmf: negative counts");
  if (r_t_squared < 0.0) {
    throw std::invalid_argument("photon_number_pmf: negative intensity");
  }
  const double z = 2.0 * r_t_squared;
  const double log_beta_pq = sf::log_beta(p + 0.5, q + 0.5);
  std::vector<double> pmf(m_max + 1);
  for (std::int64_t m = 0; m <= m_max; ++m) {
    pmf[m] = std::exp(log_pc_entry(m, p, q, z, log_beta_pq));
  }
  return pmf;
}

CsvTable photon_number_distribution(std::int64_t p, std::int64_t q,
                                    double r_t_squared, std::int64_t m_max) {
  const double z = 2.0 * r_t_squared;
  std::int64_t guess = (m_max >= 0)
                           ? m_max
                           : static_cast<std::int64_t>(std::ceil(z + 10.0 * std::sqrt(z + 1.0) + 20.0));
  constexpr double kMassTolerance = 1e-9;
  std::vector<double> pc, pd;
  for (int attempt = 0; attempt < 40; ++attempt) {
    pc = photon_number_pmf(p, q, r_t_squared, guess);
    pd = photon_number_pmf(q, p, r_t_squared, guess);
    const double mass_c = sf::pairwise_sum(pc);
    const double mass_d = sf::pairwise_sum(pd);
    if (1.0 - mass_c <= kMassTolerance && 1.0 - mass_d <= kMassTolerance) break;
    guess = guess * 3 / 2 + 32;
  }
  CsvTable table;
  table.headers = {"m", "P_c", "P_d"};
  table.columns.resize(3);
  for (std::int64_t m = 0; m < static_cast<std::int64_t>(pc.size()); ++m) {
    table.columns[0].push_back(static_cast<double>(m));
    table.columns[1].push_back(pc[m]);
    table.columns[2].push_back(pd[m]);
  }
  return table;
}

namespace {

// Per-trajectory RNG layout: counter 0, 1 -> phases; 2 -> jump count;
// 3 + 2j, 4 + 2j -> time and channel draws of jump j.
Trajectory simulate(const ApparatusConfig& config, std::int64_t index,
                    double phi_a, double phi_b) {
  const rng::Stream stream(config.seed, static_cast<std::uint64_t>(index));
  Trajectory traj;
  traj.phi_a = phi_a;
  traj.phi_b = phi_b;

  const double R = config.damping_rate();
  const double big_lambda = config.expected_jumps();
  const double delta = phi_a - phi_b;
  const double p_c = std::sin(0.5 * delta) * std::sin(0.5 * delta);

  const std::int64_t s = stream.poisson(big_lambda, 2);
  std::vector<double> times(s);
  for (std::int64_t j = 0; j < s; ++j) {
    // Inverse of Lambda(t') = 2 r0^2 (1 - e^{-2Rt'}) at a uniform fill level.
    const double u = stream.uniform(3 + 2 * j);
    times[j] = -0.5 / R * std::log1p(-u * big_lambda / (2.0 * config.r0 * config.r0));
  }
  std::sort(times.begin(), times.end());
  traj.record.times = std::move(times);
  traj.record.channels.resize(s);
  for (std::int64_t j = 0; j < s; ++j) {
    const bool in_c = stream.uniform(4 + 2 * j) < p_c;
    traj.record.channels[j] = in_c ? 0 : 1;
    (in_c ? traj.record.p : traj.record.q) += 1;
  }
  traj.record.r_t = config.residual_amplitude();
  return traj;
}

}  // namespace

std::vector<Trajectory> mcwf_run(const ApparatusConfig& config,
                                 std::int64_t trajectories, int workers) {
  if (trajectories < 1) {
    throw std::invalid_argument("mcwf_run: need at least one trajectory");
  }
  std::vector<Trajectory> out(trajectories);
  parallel_for(trajectories, workers, [&](std::int64_t i) {
    const rng::Stream phase_stream(config.seed, static_cast<std::uint64_t>(i));
    const double phi_a = 2.0 * kPi * phase_stream.uniform(0);
    const double phi_b = 2.0 * kPi * phase_stream.uniform(1);
    out[i] = simulate(config, i, phi_a, phi_b);
  });
  return out;
}

Trajectory mcwf_single(const ApparatusConfig& config, std::int64_t index,
                       double phi_a, double phi_b) {
  return simulate(config, index, phi_a, phi_b);
}

}  // namespace obpm::twin
