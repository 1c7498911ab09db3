#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "dalab/run_config.hpp"

namespace dalab {

enum ExitCode : int { kExitOk = 0, kExitPropertyFailure = 1, kExitUsage = 2 };

/// Command-line flags; each replaces the config key of the same name.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<Eigen::Index> layer;
  bool stamp = false;  // add a wall-clock "stamp" to reports
};

/// Loads the config, applies the overrides and validates.
RunConfig effective_config(const std::filesystem::path& config_path, const CliOverrides& overrides);

int cmd_train(const RunConfig& c, bool stamp, std::ostream& log);
int cmd_verify_theory(const RunConfig& c, bool stamp, std::ostream& log);
int cmd_sparsify(const RunConfig& c, bool stamp, std::ostream& log);
int cmd_fig2(const RunConfig& c, bool stamp, std::ostream& log);
int cmd_ablate(const RunConfig& c, bool stamp, std::ostream& log);

/// Dispatches by subcommand name and maps errors to exit codes; messages go to `err`.
int run_command(const std::string& name, const std::filesystem::path& config_path, const CliOverrides& overrides,
                std::ostream& log, std::ostream& err);

/// Fixed 6-decimal rendering used in every CSV.
std::string csv_number(double v);

}  // namespace dalab
