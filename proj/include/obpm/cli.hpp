#ifndef OBPM_CLI_HPP
#define OBPM_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "obpm/config.hpp"

namespace obpm::cli {

/// Exit codes: 0 success, 2 configuration error, 3 numerical-tolerance
/// failure of an acceptance assertion embedded in a run.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitTolerance = 3;

struct CommonOptions {
  std::string out_dir = ".";
  int workers = 1;
  std::optional<std::uint64_t> seed_override;
};

int cmd_homodyne(const KeyValueConfig& config, const CommonOptions& opts);
int cmd_teleport(const KeyValueConfig& config, const CommonOptions& opts);
int cmd_jumps(const KeyValueConfig& config, const CommonOptions& opts);
int cmd_fig2(const KeyValueConfig& config, const CommonOptions& opts);

/// Full front door: subcommands homodyne | teleport | jumps | fig2 with flags
/// --config PATH, --out DIR, --workers N, --seed U64. OBPM_LAB_OUT provides
/// the default output directory.
int run_cli(int argc, const char* const* argv);

}  // namespace obpm::cli

#endif
