#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "obpm/cvqt.hpp"
#include "obpm/fock.hpp"
#include "obpm/rng.hpp"
#include "obpm/special_functions.hpp"
#include "oracles.hpp"

using namespace obpm;
using fock::cxd;
using fock::PureState;

namespace {

constexpr double kPi = std::numbers::pi;

PureState fock_one(int dim) { return fock::basis_state({dim}, {1}); }

double rel_state_diff(const PureState& a, const PureState& b, std::size_t count) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    num += std::norm(a.amps[i] - b.amps[i]);
    den += std::norm(b.amps[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("transfer kernel: gamma = 0 collapses to the geometric transfer") {
  const int cutoff = 16;
  const double eta = 0.6;
  const auto tk = cvqt::transfer_kernel(cxd{0.0, 0.0}, eta, 1.1, cutoff);
  const double pref = std::sqrt((1.0 - eta * eta) / (2.0 * kPi));
  for (int m = 0; m < cutoff; ++m) {
    for (int n = 0; n < cutoff; ++n) {
      const double want = (m == n) ? pref * std::pow(eta, n) : 0.0;
      CHECK(std::abs(tk.matrix.at(m, n) - want) < 1e-14);
    }
  }
}

TEST_CASE("transfer kernel matches the direct entry formula") {
  const cxd gamma{0.9, -0.6};
  const double eta = 0.55, phi = 0.8;
  const int cutoff = 24;
  const auto tk = cvqt::transfer_kernel(gamma, eta, phi, cutoff);

  const cxd u = -eta * std::conj(gamma) * std::polar(1.0, -phi);
  const cxd v = std::conj(gamma) * std::polar(1.0, -phi);
  const double pref = std::exp(-0.5 * std::norm(gamma) * (1.0 - eta * eta)) *
                      std::sqrt((1.0 - eta * eta) / (2.0 * kPi));
  double worst = 0.0;
  for (int m = 0; m < cutoff; ++m) {
    for (int n = 0; n < cutoff; ++n) {
      cxd acc{0.0, 0.0};
      for (int k = m; k <= n; ++k) {
        if (k < m) continue;
        const cxd left = std::pow(u, k - m) *
                         std::exp(0.5 * (sf::log_factorial(k) - sf::log_factorial(m)) -
                                  sf::log_factorial(k - m));
        const cxd right = std::pow(v, n - k) *
                          std::exp(0.5 * (sf::log_factorial(n) - sf::log_factorial(k)) -
                                   sf::log_factorial(n - k));
        acc += left * std::pow(eta, k) * right;
      }
      worst = std::max(worst, std::abs(tk.matrix.at(m, n) - pref * acc));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("eta = 0 kernel reduces to a vacuum projection") {
  const cxd gamma{0.4, 0.7};
  const double phi = 0.3;
  const int dim = 20;
  const PureState psi = fock::coherent_state(1.0, 0.5, 36);
  const PureState out = cvqt::transfer_kernel_apply(gamma, 0.0, phi, psi);
  // T|psi> = (2 pi)^{-1/2} e^{-|gamma|^2/2} <0|exp(conj(gamma) e^{-i phi} a)|psi> |0>.
  cxd overlap{0.0, 0.0};
  const cxd v = std::conj(gamma) * std::polar(1.0, -phi);
  cxd coeff = 1.0;
  for (int n = 0; n < 36; ++n) {
    if (n > 0) coeff *= v / static_cast<double>(n);
    overlap += coeff * std::exp(0.5 * sf::log_factorial(n)) * psi.amps[n];
  }
  const cxd want = overlap * std::exp(-0.5 * std::norm(gamma)) / std::sqrt(2.0 * kPi);
  CHECK(std::abs(out.amps[0] - want) < 1e-12);
  for (int n = 1; n < dim; ++n) CHECK(std::abs(out.amps[n]) == 0.0);
}

TEST_CASE("displacement link: D(eta gamma e^{i phi}) o Bell kernel = transfer kernel") {
  const cxd gamma{0.8, 0.5};
  const double eta = 0.6, phi = 0.9;
  const int cutoff = 25;
  // Form the product on a larger space, then compare the cutoff-25 block so
  // the displacement's internal sum is converged.
  const int big = 64;
  const fock::LinearOp bell = cvqt::bell_kernel_matrix(gamma, eta, phi, cutoff, big);
  const fock::LinearOp d = fock::displacement_op(eta * gamma * std::polar(1.0, phi), big);
  const fock::LinearOp lhs = fock::matmul(d, bell);
  const auto tk = cvqt::transfer_kernel(gamma, eta, phi, big);
  double worst = 0.0;
  for (int m = 0; m < cutoff; ++m) {
    for (int n = 0; n < cutoff; ++n) {
      worst = std::max(worst, std::abs(lhs.at(m, n) - tk.matrix.at(m, n)));
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("build_cvqt_initial") {
  const PureState input = fock::coherent_state(1.0, 0.2, 36);
  CHECK_THROWS_WITH_AS(cvqt::build_cvqt_initial(input, 1.0, 16),
                       doctest::Contains("1 - eps"), std::invalid_argument);

  SUBCASE("eta = 0 members are input x vacuum pair") {
    const auto init = cvqt::build_cvqt_initial(input, 0.0, 16);
    const PureState member = init.ensemble.member(3);
    CHECK(member.mode_count() == 3);
    CHECK(std::abs(member.at({0, 0, 0}) - input.amps[0]) < 1e-15);
    CHECK(std::abs(member.at({0, 1, 1})) == 0.0);
  }

  SUBCASE("members are normalized product states") {
    const auto init = cvqt::build_cvqt_initial(input, 0.5, 16);
    for (std::size_t i : {std::size_t{0}, std::size_t{7}}) {
      CHECK(std::abs(init.ensemble.member(i).norm() - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("Bell projection against the brute-force three-mode contraction") {
  // The closed-form kernel route must reproduce the explicit
  // beamsplitter-plus-double-quadrature contraction.
  const PureState inputs[] = {
      fock::basis_state({20}, {0}),
      fock_one(20),
      fock::coherent_state(1.0, 0.7, 36),
  };
  rng::Stream stream(20250811, 0);
  int checked = 0;
  for (int trial = 0; trial < 6; ++trial) {
    const PureState& input = inputs[trial % 3];
    const double eta = 0.7 * stream.uniform(10 * trial);
    const double phi = 2.0 * kPi * stream.uniform(10 * trial + 1);
    const double x1 = 4.0 * stream.uniform(10 * trial + 2) - 2.0;
    const double x2 = 4.0 * stream.uniform(10 * trial + 3) - 2.0;

    const int pair_cutoff = std::max(cvqt::tms_cutoff(eta), input.dims[0] + 12);
    const PureState brute = oracles::brute_force_bell(input, eta, phi, x1, x2, pair_cutoff);

    const cxd gamma = cxd{x1, x2} / std::sqrt(2.0);
    const PureState closed =
        cvqt::bell_kernel_apply(gamma, eta, phi, input, pair_cutoff);
    CHECK(rel_state_diff(closed, brute, pair_cutoff) < 1e-6);
    ++checked;
  }
  CHECK(checked == 6);
}

TEST_CASE("Bell density at eta = 0 is the phase-averaged Husimi overlap") {
  const PureState input = fock::coherent_state(1.0, 0.4, 36);
  const auto init = cvqt::build_cvqt_initial(input, 0.0, 64);
  const double x1 = 0.9, x2 = -1.3;
  const auto bp = cvqt::bell_projection(init, x1, x2);

  const cxd gamma = cxd{x1, x2} / std::sqrt(2.0);
  std::vector<double> terms(64);
  const auto grid = homodyne::uniform_phase_grid(64);
  for (int k = 0; k < 64; ++k) {
    const cxd alpha = gamma * std::polar(1.0, grid[k]);
    const PureState coh =
        fock::coherent_state(std::abs(alpha), std::arg(alpha), 36);
    terms[k] = std::norm(fock::inner_product(coh, input)) / (2.0 * kPi) / 64.0;
  }
  const double husimi = sf::pairwise_sum(terms);
  CHECK(std::abs(bp.density - husimi) < 1e-8);
}

TEST_CASE("Bell density for the vacuum at eta = 0 matches brute force") {
  const PureState vac = fock::basis_state({12}, {0});
  const auto init = cvqt::build_cvqt_initial(vac, 0.0, 16);
  const auto bp = cvqt::bell_projection(init, 0.0, 0.0);

  const auto grid = homodyne::uniform_phase_grid(16);
  std::vector<double> terms(16);
  for (int k = 0; k < 16; ++k) {
    const PureState brute = oracles::brute_force_bell(vac, 0.0, grid[k], 0.0, 0.0, 14);
    terms[k] = brute.norm_sq() / 16.0;
  }
  CHECK(std::abs(bp.density - sf::pairwise_sum(terms)) < 1e-10);
  // The vacuum Husimi density at the origin outcome: (2 pi)^{-1}.
  CHECK(std::abs(bp.density - 1.0 / (2.0 * kPi)) < 1e-12);
}

TEST_CASE("Bell density is stable under phase-grid doubling") {
  const PureState input = fock::coherent_state(1.0, 0.0, 36);
  const auto a = cvqt::bell_projection(cvqt::build_cvqt_initial(input, 0.5, 64), 1.0, -0.5);
  const auto b = cvqt::bell_projection(cvqt::build_cvqt_initial(input, 0.5, 128), 1.0, -0.5);
  CHECK(std::abs(a.density - b.density) < 1e-8);
}

TEST_CASE("Bell density integrates to one") {
  const PureState input = fock_one(12);
  const auto init = cvqt::build_cvqt_initial(input, 0.5, 64);
  const int n = 41;
  const double lim = 8.0;
  const double h = 2.0 * lim / (n - 1);
  std::vector<double> rows(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> terms(n);
    const double x1 = -lim + i * h;
    for (int j = 0; j < n; ++j) {
      const double x2 = -lim + j * h;
      const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      terms[j] = wj * cvqt::bell_projection(init, x1, x2).density * h;
    }
    const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    rows[i] = wi * sf::pairwise_sum(terms) * h;
  }
  CHECK(std::abs(sf::pairwise_sum(rows) - 1.0) < 1e-3);
}

TEST_CASE("global phase equivariance of the kernel outputs") {
  const PureState input = fock::coherent_state(1.0, 0.3, 36);
  const double phi0 = 1.234;
  const cxd gamma{0.8, -0.2};
  const double eta = 0.6;
  for (double phi : {0.0, 0.7, 2.9}) {
    const PureState a = cvqt::bell_kernel_apply(gamma, eta, phi, input, 60);
    const PureState b = cvqt::bell_kernel_apply(
        gamma, eta, phi + phi0, fock::rotate_mode(input, 0, phi0), 60);
    CHECK(std::abs(a.norm_sq() - b.norm_sq()) < 1e-12);
  }
}

TEST_CASE("teleport at eta = 0 delivers the vacuum") {
  const PureState input = fock::coherent_state(1.0, 0.0, 36);
  const auto out = cvqt::teleport(input, 0.0, 0.8, -0.4, true);
  CHECK(std::abs(out.fidelity - std::exp(-1.0)) < 1e-10);
  const PureState member = out.output.member(0);
  CHECK(std::abs(std::abs(member.amps[0]) - 1.0) < 1e-12);
}

TEST_CASE("teleporting a coherent state with a shared phase: closed form") {
  // The transfer kernel maps |alpha> to |eta alpha| exactly, so the fidelity
  // is e^{-(1 - eta)^2 |alpha|^2} for every outcome.
  const PureState input = fock::coherent_state(1.0, 0.0, 36);
  for (double eta : {0.0, 0.3, 0.6, 0.9}) {
    const auto out = cvqt::teleport(input, eta, 0.7, -0.3, true);
    const double want = std::exp(-(1.0 - eta) * (1.0 - eta));
    CHECK(std::abs(out.fidelity - want) < 1e-6);
  }
}

TEST_CASE("teleporting the vacuum at eta = 0.9, outcome (0, 0)") {
  const PureState vac = fock::basis_state({24}, {0});
  const auto out = cvqt::teleport(vac, 0.9, 0.0, 0.0, true);
  CHECK(out.fidelity >= 0.94);
}

TEST_CASE("unshared phase distorts the reconstruction") {
  const PureState input = fock::coherent_state(1.0, 0.0, 36);
  const auto shared = cvqt::teleport(input, 0.9, 1.0, 0.5, true);
  const auto unshared = cvqt::teleport(input, 0.9, 1.0, 0.5, false);
  CHECK(shared.fidelity - unshared.fidelity > 0.1);
  CHECK(std::abs(shared.density - unshared.density) < 1e-9);
}

TEST_CASE("transfer-kernel outputs lose their phase dependence as eta -> 1") {
  const PureState input = fock_one(12);
  const cxd gamma{0.7, 0.35};
  const auto grid = homodyne::uniform_phase_grid(16);
  double prev = 1.0;
  for (double eta : {0.98, 0.99, 0.995}) {
    std::vector<PureState> outs;
    for (double phi : grid) {
      outs.push_back(fock::normalized(cvqt::transfer_kernel_apply(gamma, eta, phi, input)));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < outs.size(); ++i) {
      for (std::size_t j = i + 1; j < outs.size(); ++j) {
        const double deficit = 1.0 - std::norm(fock::inner_product(outs[i], outs[j]));
        worst = std::max(worst, deficit);
      }
    }
    CHECK(worst < prev);
    prev = worst;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("fidelity sweep: analytic eta = 0 row, monotonicity, determinism") {
  const PureState input = fock::coherent_state(1.0, 0.0, 36);
  const std::vector<double> etas = {0.0, 0.3, 0.6, 0.9};
  const auto sweep = cvqt::fidelity_sweep(input, etas, true, 60, 7, {}, 1);
  REQUIRE(sweep.rows.size() == 4);

  // eta = 0: every outcome yields the vacuum, so the estimator is exact.
  CHECK(std::abs(sweep.rows[0].mean_fidelity - std::exp(-1.0)) <
        2.0 * sweep.rows[0].std_err + 1e-9);

  for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
    const double step = sweep.rows[i].mean_fidelity - sweep.rows[i - 1].mean_fidelity;
    CHECK(step > -1.0 * (sweep.rows[i].std_err + sweep.rows[i - 1].std_err));
  }

  const auto again = cvqt::fidelity_sweep(input, etas, true, 60, 7, {}, 3);
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    CHECK(sweep.rows[i].mean_fidelity == again.rows[i].mean_fidelity);
    CHECK(sweep.rows[i].std_err == again.rows[i].std_err);
  }

  CHECK_THROWS_AS(cvqt::fidelity_sweep(input, {}, true, 60, 7, {}, 1),
                  std::invalid_argument);
}

TEST_CASE("fidelity sweep approaches ideal teleportation for a one-photon input") {
  const PureState input = fock_one(16);
  const auto sweep = cvqt::fidelity_sweep(input, {0.99}, true, 200, 11, {}, 1);
  CHECK(sweep.rows[0].mean_fidelity > 0.9);
}
