#include "obpm/homodyne.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "obpm/special_functions.hpp"

namespace obpm::homodyne {

using fock::cxd;
using fock::PureState;

namespace {
constexpr double kPi = std::numbers::pi;

bool is_power_of_two(int k) { return k > 0 && (k & (k - 1)) == 0; }
}  // namespace

std::vector<double> uniform_phase_grid(int K) {
  if (K < 16 || !is_power_of_two(K)) {
    throw std::invalid_argument("phase grid size must be a power of two >= 16, got " +
                                std::to_string(K));
  }
  std::vector<double> grid(K);
  for (int k = 0; k < K; ++k) grid[k] = 2.0 * kPi * k / K;
  return grid;
}

PhaseEnsemble::PhaseEnsemble(std::vector<double> weights,
                             std::vector<std::vector<double>> phases, Generator make)
    : weights_(std::move(weights)), phases_(std::move(phases)), make_(std::move(make)) {
  if (weights_.empty() || weights_.size() != phases_.size() || !make_) {
    throw std::invalid_argument("PhaseEnsemble: inconsistent construction");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (w < 0.0) throw std::invalid_argument("PhaseEnsemble: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("PhaseEnsemble: weights sum to " + std::to_string(total));
  }
  const std::size_t axes = phases_[0].size();
  for (const auto& p : phases_) {
    if (p.size() != axes) throw std::invalid_argument("PhaseEnsemble: ragged phases");
  }
}

int PhaseEnsemble::phase_axes() const { return static_cast<int>(phases_[0].size()); }

PhaseEnsemble squeezed_pump_prior(double s, int K, int cutoff) {
  const auto grid = uniform_phase_grid(K);
  std::vector<double> weights(K, 1.0 / K);
  std::vector<std::vector<double>> phases(K);
  for (int k = 0; k < K; ++k) phases[k] = {grid[k]};
  auto make = [s, cutoff](const std::vector<double>& ph) {
    return fock::squeezed_vacuum(s, 2.0 * ph[0], cutoff);
  };
  PhaseEnsemble ens(std::move(weights), std::move(phases), std::move(make));
  ens.grid_points = K;
  return ens;
}

PhaseEnsemble vacuum_prior(int K, int cutoff) {
  const auto grid = uniform_phase_grid(K);
  std::vector<double> weights(K, 1.0 / K);
  std::vector<std::vector<double>> phases(K);
  for (int k = 0; k < K; ++k) phases[k] = {grid[k]};
  auto make = [cutoff](const std::vector<double>&) {
    return fock::basis_state({cutoff}, {0});
  };
  PhaseEnsemble ens(std::move(weights), std::move(phases), std::move(make));
  ens.grid_points = K;
  return ens;
}

PhaseEnsemble two_laser_prior(double r0, int K, int cutoff) {
  const auto grid = uniform_phase_grid(K);
  std::vector<double> weights(static_cast<std::size_t>(K) * K, 1.0 / (static_cast<double>(K) * K));
  std::vector<std::vector<double>> phases;
  phases.reserve(weights.size());
  for (int a = 0; a < K; ++a) {
    for (int b = 0; b < K; ++b) phases.push_back({grid[a], grid[b]});
  }
  auto make = [r0, cutoff](const std::vector<double>& ph) {
    return fock::tensor(fock::coherent_state(r0, ph[0], cutoff),
                        fock::coherent_state(r0, ph[1], cutoff));
  };
  PhaseEnsemble ens(std::move(weights), std::move(phases), std::move(make));
  ens.source_amplitude = r0;
  ens.grid_points = K;
  return ens;
}

namespace {

// |<x, theta|psi>|^2 for every x in the grid, one member at a time. The bra
// coefficients factor as (2 pi)^{-1/4} e^{-x^2/4} c_n(x) e^{i n theta}; the
// theta phases rotate the member once, then each x is a real-weighted dot.
void member_densities(const PureState& psi, double theta,
                      std::span<const double> x_grid,
                      const std::vector<std::vector<double>>& hermite_cols,
                      std::span<double> out) {
  const int dim = psi.dims[0];
  std::vector<cxd> rotated(dim);
  for (int n = 0; n < dim; ++n) {
    rotated[n] = std::polar(1.0, -theta * n) * psi.amps[n];
  }
  const double pref = std::pow(2.0 * kPi, -0.25);
  for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
    const auto& c = hermite_cols[ix];
    cxd acc{0.0, 0.0};
    for (int n = 0; n < dim; ++n) acc += c[n] * rotated[n];
    const double scale = pref * std::exp(-x_grid[ix] * x_grid[ix] / 4.0);
    out[ix] = std::norm(scale * acc);
  }
}

std::vector<std::vector<double>> hermite_columns(std::span<const double> x_grid, int dim) {
  std::vector<std::vector<double>> cols(x_grid.size());
  for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
    cols[ix] = sf::scaled_hermite_coeffs(x_grid[ix], dim - 1);
  }
  return cols;
}

void require_single_mode(const PureState& psi, int signal_mode) {
  if (psi.mode_count() != 1 || signal_mode != 0) {
    throw std::invalid_argument(
        "obpm_measure: ensemble members must be single-mode signal states");
  }
}

}  // namespace

DistributionTable obpm_measure(const PhaseEnsemble& prior, int signal_mode,
                               double lo_phase_offset,
                               std::span<const double> x_grid) {
  if (x_grid.empty()) throw std::invalid_argument("obpm_measure: empty x grid");
  for (std::size_t i = 1; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > x_grid[i - 1])) {
      throw std::invalid_argument("obpm_measure: x grid must be strictly increasing");
    }
  }
  const std::size_t m = prior.size();
  const std::size_t nx = x_grid.size();

  const PureState first = prior.member(0);
  require_single_mode(first, signal_mode);
  const int dim = first.dims[0];
  const auto cols = hermite_columns(x_grid, dim);

  // Row per member, fixed order; reduced with pairwise summation.
  std::vector<double> dens(m * nx);
  for (std::size_t i = 0; i < m; ++i) {
    const PureState psi = (i == 0) ? first : prior.member(i);
    require_single_mode(psi, signal_mode);
    if (psi.dims[0] != dim) {
      throw std::invalid_argument("obpm_measure: ensemble members disagree on cutoff");
    }
    const double theta = prior.phases(i)[0] + lo_phase_offset;
    member_densities(psi, theta, x_grid, cols, {&dens[i * nx], nx});
  }

  DistributionTable table;
  table.values.assign(x_grid.begin(), x_grid.end());
  table.densities.resize(nx);
  std::vector<double> column(m);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t i = 0; i < m; ++i) column[i] = prior.weight(i) * dens[i * nx + ix];
    table.densities[ix] = sf::pairwise_sum(column);
  }
  return table;
}

std::vector<double> per_phase_density(const PhaseEnsemble& prior, int signal_mode,
                                      double lo_phase_offset, double x) {
  const double grid[1] = {x};
  const std::size_t m = prior.size();
  std::vector<double> out(m);
  const PureState first = prior.member(0);
  require_single_mode(first, signal_mode);
  const auto cols = hermite_columns(std::span<const double>(grid, 1), first.dims[0]);
  for (std::size_t i = 0; i < m; ++i) {
    const PureState psi = (i == 0) ? first : prior.member(i);
    double d = 0.0;
    member_densities(psi, prior.phases(i)[0] + lo_phase_offset,
                     std::span<const double>(grid, 1), cols, {&d, 1});
    out[i] = d;
  }
  return out;
}

HomodyneOutcome obpm_posterior(const PhaseEnsemble& prior, int signal_mode,
                               double lo_phase_offset, double x) {
  const std::vector<double> dens = per_phase_density(prior, signal_mode, lo_phase_offset, x);
  const std::size_t m = prior.size();
  std::vector<double> weighted(m);
  for (std::size_t i = 0; i < m; ++i) weighted[i] = prior.weight(i) * dens[i];
  const double density = sf::pairwise_sum(weighted);
  if (density <= 0.0) {
    throw std::runtime_error("obpm_posterior: outcome has zero density");
  }
  std::vector<double> post_w(m);
  for (std::size_t i = 0; i < m; ++i) post_w[i] = weighted[i] / density;
  // Normalize exactly so the ensemble invariant holds despite rounding.
  const double total = sf::pairwise_sum(post_w);
  for (double& w : post_w) w /= total;

  std::vector<std::vector<double>> phases;
  phases.reserve(m);
  for (std::size_t i = 0; i < m; ++i) phases.push_back(prior.phases(i));
  const int dim = prior.member(0).dims[0];
  auto make = [x, lo_phase_offset, dim](const std::vector<double>& ph) {
    return fock::normalized(fock::quadrature_state(x, ph[0] + lo_phase_offset, dim));
  };
  HomodyneOutcome out{x, density,
                      PhaseEnsemble(std::move(post_w), std::move(phases), std::move(make))};
  return out;
}

DistributionTable squeezed_light_experiment(double s, double varphi,
                                            std::span<const double> x_grid,
                                            int K, int cutoff) {
  const PhaseEnsemble prior = squeezed_pump_prior(s, K, cutoff);
  DistributionTable table = obpm_measure(prior, 0, varphi, x_grid);

  // The pump-phase average must be a trivial one: every phi sample produces
  // the same density by phase covariance. Checked at a few grid points.
  const std::size_t nx = x_grid.size();
  for (std::size_t ix : {std::size_t{0}, nx / 4, nx / 2, (3 * nx) / 4, nx - 1}) {
    const auto dens = per_phase_density(prior, 0, varphi, x_grid[ix]);
    double lo = dens[0], hi = dens[0];
    for (double d : dens) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    if (hi - lo > 1e-9) {
      throw std::runtime_error(
          "squeezed_light_experiment: density is not phase independent (spread " +
          std::to_string(hi - lo) + ")");
    }
  }
  return table;
}

PhaseEnsemble twin_laser_bhd(const PhaseEnsemble& prior, double cos_outcome) {
  if (std::abs(cos_outcome) > 1.0) {
    throw std::invalid_argument("twin_laser_bhd: cos outcome must lie in [-1, 1]");
  }
  if (prior.phase_axes() != 2 || !prior.source_amplitude || !prior.grid_points) {
    throw std::invalid_argument("twin_laser_bhd: prior must be a two-laser mixture");
  }
  const double r0 = *prior.source_amplitude;
  const int K = *prior.grid_points;
  const int cutoff = prior.member(0).dims[0];
  const auto grid = uniform_phase_grid(K);
  const double delta = std::acos(cos_outcome);

  // Branches +delta and -delta coincide when delta = 0 or pi.
  const bool degenerate = (delta < 1e-12) || (kPi - delta < 1e-12);
  const int branches = degenerate ? 1 : 2;
  std::vector<double> weights(static_cast<std::size_t>(branches) * K,
                              1.0 / (static_cast<double>(branches) * K));
  std::vector<std::vector<double>> phases;
  phases.reserve(weights.size());
  for (int b = 0; b < branches; ++b) {
    const double sign = (b == 0) ? 1.0 : -1.0;
    for (int k = 0; k < K; ++k) {
      phases.push_back({grid[k], grid[k] + sign * delta});
    }
  }
  auto make = [r0, cutoff](const std::vector<double>& ph) {
    return fock::tensor(fock::coherent_state(r0, ph[0], cutoff),
                        fock::coherent_state(r0, ph[1], cutoff));
  };
  PhaseEnsemble ens(std::move(weights), std::move(phases), std::move(make));
  ens.source_amplitude = r0;
  ens.grid_points = K;
  return ens;
}

GridMoments grid_moments(const DistributionTable& table) {
  const auto& xs = table.values;
  const auto& ps = table.densities;
  if (xs.size() < 2) throw std::invalid_argument("grid_moments: need >= 2 points");
  GridMoments m;
  double mx = 0.0, mxx = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double h = xs[i + 1] - xs[i];
    m.mass += 0.5 * h * (ps[i] + ps[i + 1]);
    mx += 0.5 * h * (xs[i] * ps[i] + xs[i + 1] * ps[i + 1]);
    mxx += 0.5 * h * (xs[i] * xs[i] * ps[i] + xs[i + 1] * xs[i + 1] * ps[i + 1]);
  }
  m.mean = mx / m.mass;
  m.variance = mxx / m.mass - m.mean * m.mean;
  return m;
}

}  // namespace obpm::homodyne
