#pragma once

// Subcommands behind the `delayvar` executable. Each returns the process
// exit code and never throws.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace delayvar {

enum class LogLevel { Quiet, Info, Debug };

/// From DELAYVAR_LOG (quiet | info | debug); info when unset or unrecognized.
LogLevel log_level_from_env();

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config_error = 1;
inline constexpr int not_converged = 2;
inline constexpr int check_failed = 3;
}  // namespace exit_code

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out_dir;  // overrides output.dir
  std::optional<std::uint64_t> seed;             // overrides solver.seed and identity.seed
  std::optional<double> threshold;               // overrides verify.threshold
  std::filesystem::path trajectory;              // verify only
  LogLevel log = LogLevel::Info;
};

/// trajectory.csv, el_report.csv, summary.csv, plot.svg.
/// 0 converged, 2 not converged, 1 configuration error.
int cmd_solve(const CommandOptions& opts, std::ostream& log);

/// el_report.csv and verify.csv for a stored trajectory.
/// 0 when residual_osc <= threshold, 3 above it, 1 on unreadable or mismatched input.
int cmd_verify(const CommandOptions& opts, std::ostream& log);

/// identity_report.csv. 0 when every suite passes, 3 otherwise.
int cmd_identity(const CommandOptions& opts, std::ostream& log);

/// levels.csv. 0 when residual_osc decreases strictly across levels, 3 otherwise.
int cmd_converge(const CommandOptions& opts, std::ostream& log);

}  // namespace delayvar
