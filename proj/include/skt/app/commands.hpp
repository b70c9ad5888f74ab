#pragma once

// Subcommands of the skt tool. Exit codes: 0 success, 1 configuration error,
// 2 numerical failure, 3 a verification check failed.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "skt/app/config.hpp"
#include "skt/verify.hpp"

namespace skt::app {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2, kExitCheck = 3 };

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<SolveMode> mode;
  bool progress = false;
  bool flip_correction_sign = false;
};

/// Loads the config file and applies command-line overrides.
RunConfig resolve_config(const CommandOptions& opts);

/// Every configured check of `verify` in a fixed order.
std::vector<CheckReport> run_checks(const RunConfig& cfg);

int cmd_solve_mc(const CommandOptions& opts, std::ostream& log);
int cmd_solve_fd(const CommandOptions& opts, std::ostream& log);
int cmd_verify(const CommandOptions& opts, std::ostream& log);
int cmd_compare(const CommandOptions& opts, std::ostream& log);

}  // namespace skt::app
