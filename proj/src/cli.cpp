#include "obpm/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "obpm/cvqt.hpp"
#include "obpm/distribution.hpp"
#include "obpm/fock.hpp"
#include "obpm/homodyne.hpp"
#include "obpm/manifest.hpp"
#include "obpm/special_functions.hpp"
#include "obpm/twin_laser.hpp"

namespace obpm::cli {

namespace {

constexpr double kPi = std::numbers::pi;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + dir);
}

fock::PureState input_from_config(const KeyValueConfig& config) {
  const std::string kind = config.get_string("input", "vacuum");
  if (kind == "vacuum") {
    return fock::basis_state({fock::cutoff_for_mean_photon(0.0)}, {0});
  }
  if (kind == "coherent") {
    const double r = config.get_double("input_r", 1.0);
    const double theta = config.get_double("input_theta", 0.0);
    return fock::coherent_state(r, theta, fock::cutoff_for_mean_photon(r * r));
  }
  if (kind == "fock") {
    const int n = static_cast<int>(config.get_int("input_n", 1));
    if (n < 0) throw ConfigError("input_n must be >= 0");
    const int cutoff = fock::cutoff_for_mean_photon(static_cast<double>(n));
    return fock::basis_state({cutoff}, {n});
  }
  throw ConfigError("input must be vacuum, coherent or fock, got '" + kind + "'");
}

}  // namespace

int cmd_homodyne(const KeyValueConfig& config, const CommonOptions& opts) {
  config.require_known_keys({"s", "varphi", "varphi_count", "x_min", "x_max",
                             "x_points", "phase_samples", "cutoff", "seed"});
  const double s = config.get_double("s");
  if (s < 0.0) throw ConfigError("s must be >= 0");
  const double varphi0 = config.get_double("varphi", 0.0);
  const int count = static_cast<int>(config.get_int("varphi_count", 1));
  if (count < 1) throw ConfigError("varphi_count must be >= 1");
  const double x_min = config.get_double("x_min", -10.0);
  const double x_max = config.get_double("x_max", 10.0);
  const int x_points = static_cast<int>(config.get_int("x_points", 801));
  if (!(x_max > x_min) || x_points < 2) throw ConfigError("bad x grid");
  const int K = static_cast<int>(config.get_int("phase_samples", 64));
  const int cutoff = static_cast<int>(config.get_int("cutoff", 120));
  const std::uint64_t seed =
      opts.seed_override ? *opts.seed_override
                         : static_cast<std::uint64_t>(config.get_int("seed", 0));

  ensure_out_dir(opts.out_dir);
  Stopwatch clock;
  RunManifest manifest("homodyne", seed);
  manifest.add_config(config.items());

  const auto grid = linspace(x_min, x_max, x_points);
  std::vector<double> variances(count);
  for (int k = 0; k < count; ++k) {
    const double varphi = varphi0 + kPi * k / count;
    const DistributionTable table =
        homodyne::squeezed_light_experiment(s, varphi, grid, K, cutoff);
    char name[64];
    std::snprintf(name, sizeof(name), "homodyne_%03d.csv", k);
    manifest.write_output(opts.out_dir, name, table.to_csv());
    variances[k] = homodyne::grid_moments(table).variance;
  }

  bool ok = true;
  if (count >= 2 && count % 2 == 0) {
    double lo = variances[0], hi = variances[0];
    for (double v : variances) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double product = lo * hi;
    const bool pass = std::abs(product - 1.0) < 1e-4;
    ok = ok && pass;
    manifest.add_note("variance_min_max_product = " + format_g17(product) +
                      (pass ? " (pass)" : " (FAIL)"));
  }
  manifest.set_duration(clock.seconds());
  manifest.write(opts.out_dir);
  return ok ? kExitOk : kExitTolerance;
}

int cmd_teleport(const KeyValueConfig& config, const CommonOptions& opts) {
  config.require_known_keys({"input", "input_r", "input_theta", "input_n", "etas",
                             "shared", "samples", "seed", "phase_samples",
                             "bob_phase_samples"});
  const fock::PureState input = input_from_config(config);
  const std::vector<double> etas = config.get_double_list("etas");
  for (double eta : etas) {
    if (eta < 0.0 || eta >= 1.0) {
      throw ConfigError("etas must lie in [0, 1); for the ideal limit sweep "
                        "eta = 1 - eps instead of eta = 1");
    }
  }
  const bool shared = config.get_bool("shared", true);
  const int samples = static_cast<int>(config.get_int("samples", 200));
  if (samples < 2) throw ConfigError("samples must be >= 2");
  const std::uint64_t seed =
      opts.seed_override ? *opts.seed_override
                         : static_cast<std::uint64_t>(config.get_int("seed", 1));
  cvqt::TeleportOptions topts;
  topts.phase_samples = static_cast<int>(config.get_int("phase_samples", 64));
  topts.bob_phase_samples = static_cast<int>(config.get_int("bob_phase_samples", 32));

  ensure_out_dir(opts.out_dir);
  Stopwatch clock;
  RunManifest manifest("teleport", seed);
  manifest.add_config(config.items());

  const cvqt::FidelitySweep sweep =
      cvqt::fidelity_sweep(input, etas, shared, samples, seed, topts, opts.workers);
  manifest.write_output(opts.out_dir, "fidelity.csv", sweep.to_table().to_csv());
  manifest.set_duration(clock.seconds());
  manifest.write(opts.out_dir);
  return kExitOk;
}

namespace {

struct JumpsChecks {
  double tv = 0.0;
  std::int64_t s_star = 0;
  std::int64_t conditioned = 0;
  bool pass = false;
};

JumpsChecks conditional_histogram(const std::vector<twin::Trajectory>& trajectories,
                                  std::int64_t s_star, CsvTable& table) {
  JumpsChecks checks;
  checks.s_star = s_star;
  std::vector<double> counts(s_star + 1, 0.0);
  for (const auto& traj : trajectories) {
    if (traj.record.total() == s_star) {
      counts[traj.record.p] += 1.0;
      ++checks.conditioned;
    }
  }
  table.headers = {"p", "empirical", "exact"};
  table.columns.assign(3, {});
  double tv = 0.0;
  for (std::int64_t p = 0; p <= s_star; ++p) {
    const double emp = checks.conditioned ? counts[p] / checks.conditioned : 0.0;
    const double exact = twin::jump_count_probability(s_star, p);
    table.columns[0].push_back(static_cast<double>(p));
    table.columns[1].push_back(emp);
    table.columns[2].push_back(exact);
    tv += std::abs(emp - exact);
  }
  checks.tv = 0.5 * tv;
  checks.pass = checks.tv < 0.02;
  return checks;
}

}  // namespace

int cmd_jumps(const KeyValueConfig& config, const CommonOptions& opts) {
  config.require_known_keys({"r0", "g", "tau", "t", "seed", "trajectories"});
  const double r0 = config.get_double("r0", std::sqrt(50.0));
  const double g = config.get_double("g", 1.0e4);
  const double tau = config.get_double("tau", 1.0e-6);
  const double t = config.get_double("t", 2.2314e-3);
  const std::int64_t trajectories = config.get_int("trajectories", 100000);
  if (trajectories < 1) throw ConfigError("trajectories must be >= 1");
  const std::uint64_t seed =
      opts.seed_override ? *opts.seed_override
                         : static_cast<std::uint64_t>(config.get_int("seed", 12));

  const twin::ApparatusConfig apparatus(r0, g, tau, t, seed);

  ensure_out_dir(opts.out_dir);
  Stopwatch clock;
  RunManifest manifest("jumps", seed);
  manifest.add_config(config.items());
  if (!apparatus.transit_time_valid()) {
    manifest.add_note("warning: transit time tau violates tau < 1/(sqrt(2 s) r0 g); "
                      "the at-most-one-absorption assumption is strained");
  }

  const auto trajs = twin::mcwf_run(apparatus, trajectories, opts.workers);

  CsvTable traj_table;
  traj_table.headers = {"trajectory_id", "phi_a", "phi_b", "s", "p", "q", "r_t"};
  traj_table.columns.assign(7, {});
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> pq_counts;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const auto& tr = trajs[i];
    traj_table.columns[0].push_back(static_cast<double>(i));
    traj_table.columns[1].push_back(tr.phi_a);
    traj_table.columns[2].push_back(tr.phi_b);
    traj_table.columns[3].push_back(static_cast<double>(tr.record.total()));
    traj_table.columns[4].push_back(static_cast<double>(tr.record.p));
    traj_table.columns[5].push_back(static_cast<double>(tr.record.q));
    traj_table.columns[6].push_back(tr.record.r_t);
    ++pq_counts[{tr.record.p, tr.record.q}];
  }
  manifest.write_output(opts.out_dir, "trajectories.csv", traj_table.to_csv());

  const std::int64_t s_star =
      static_cast<std::int64_t>(std::llround(apparatus.expected_jumps()));
  CsvTable hist;
  JumpsChecks checks = conditional_histogram(trajs, std::max<std::int64_t>(s_star, 1), hist);
  manifest.write_output(opts.out_dir, "pcond_hist.csv", hist.to_csv());
  if (checks.conditioned == 0) {
    checks.pass = true;  // nothing to condition on (e.g. zero coupling)
    manifest.add_note("p_given_s gate skipped: no trajectory reached s = " +
                      std::to_string(checks.s_star));
  } else {
    manifest.add_note("p_given_s = " + std::to_string(checks.s_star) +
                      ", conditioned_trajectories = " + std::to_string(checks.conditioned) +
                      ", tv_distance = " + format_g17(checks.tv) +
                      (checks.pass ? " (pass)" : " (FAIL)"));
  }

  // Posterior of the most frequent (p, q) record.
  std::pair<std::int64_t, std::int64_t> mode_pq{0, 0};
  std::int64_t best = -1;
  for (const auto& [pq, n] : pq_counts) {
    if (n > best) {
      best = n;
      mode_pq = pq;
    }
  }
  const auto posterior = twin::phase_posterior(mode_pq.first, mode_pq.second);
  manifest.write_output(opts.out_dir, "posterior.csv", posterior.tabulate(512).to_csv());
  manifest.add_note("posterior_pq = (" + std::to_string(mode_pq.first) + ", " +
                    std::to_string(mode_pq.second) + ")");

  manifest.set_duration(clock.seconds());
  manifest.write(opts.out_dir);
  return checks.pass ? kExitOk : kExitTolerance;
}

int cmd_fig2(const KeyValueConfig& config, const CommonOptions& opts) {
  config.require_known_keys({"s", "rt2", "seed"});
  const std::int64_t s = config.get_int("s", 100);
  const double rt2 = config.get_double("rt2", 1000.0);
  if (s < 1 || rt2 < 0.0) throw ConfigError("need s >= 1 and rt2 >= 0");
  const std::uint64_t seed =
      opts.seed_override ? *opts.seed_override
                         : static_cast<std::uint64_t>(config.get_int("seed", 0));

  ensure_out_dir(opts.out_dir);
  Stopwatch clock;
  RunManifest manifest("fig2", seed);
  manifest.add_config(config.items());

  const CsvTable table = twin::photon_number_distribution(s, 0, rt2);
  manifest.write_output(opts.out_dir, "photon_number.csv", table.to_csv());

  const double edge_prob =
      twin::jump_count_probability(s, 0) + twin::jump_count_probability(s, s);
  manifest.add_note("edge_probability = " + format_g17(edge_prob));
  bool ok = true;
  if (s == 100) {
    const bool pass = std::abs(edge_prob - 0.1127) < 0.0005;
    ok = ok && pass;
    manifest.add_note(std::string("edge_probability_check = ") +
                      (pass ? "pass" : "FAIL") + " (expected 0.1127 +- 0.0005)");
  }
  const double mass = sf::pairwise_sum(table.columns[1]);
  const bool mass_pass = std::abs(mass - 1.0) < 1e-9;
  ok = ok && mass_pass;
  manifest.add_note("pc_total_mass = " + format_g17(mass) +
                    (mass_pass ? " (pass)" : " (FAIL)"));

  std::size_t peak = 0;
  for (std::size_t m = 0; m < table.columns[1].size(); ++m) {
    if (table.columns[1][m] > table.columns[1][peak]) peak = m;
  }
  manifest.add_note("pc_peak_m = " + std::to_string(peak));

  manifest.set_duration(clock.seconds());
  manifest.write(opts.out_dir);
  return ok ? kExitOk : kExitTolerance;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Truncated-Fock-space quantum optics lab: homodyne detection and "
               "teleportation with phase-unknown lasers, twin-laser jump statistics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int workers = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;

  const char* env_out = std::getenv("OBPM_LAB_OUT");
  const std::string default_out = env_out ? env_out : ".";

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* copt = sub->add_option("--config", config_path, "key = value config file");
    if (config_required) copt->required();
    sub->add_option("--out", out_dir, "output directory")->default_val(default_out);
    sub->add_option("--workers", workers, "worker thread count")->default_val(1);
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      seed_given = true;
    });
  };

  CLI::App* homodyne = app.add_subcommand("homodyne", "squeezed-light homodyne scan");
  add_common(homodyne, true);
  CLI::App* teleport = app.add_subcommand("teleport", "fidelity sweep over eta");
  add_common(teleport, true);
  CLI::App* jumps = app.add_subcommand("jumps", "twin-laser trajectory sampling");
  add_common(jumps, true);
  CLI::App* fig2 = app.add_subcommand("fig2", "photon number distribution at p = s");
  add_common(fig2, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    KeyValueConfig config;
    if (!config_path.empty()) {
      config = KeyValueConfig::parse_file(config_path);
    } else {
      std::istringstream empty;
      config = KeyValueConfig::parse_stream(empty, "<defaults>");
    }
    CommonOptions opts;
    opts.out_dir = out_dir.empty() ? default_out : out_dir;
    opts.workers = workers;
    if (seed_given) opts.seed_override = seed;

    if (homodyne->parsed()) return cmd_homodyne(config, opts);
    if (teleport->parsed()) return cmd_teleport(config, opts);
    if (jumps->parsed()) return cmd_jumps(config, opts);
    if (fig2->parsed()) return cmd_fig2(config, opts);
    std::cerr << "no subcommand selected\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace obpm::cli
