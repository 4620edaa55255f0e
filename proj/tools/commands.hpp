#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace psys::cli {

enum ExitCode : int { ok = 0, config_error = 2, solver_failure = 3, check_failed = 4 };

struct Options {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha, beta;
  std::optional<std::string> resolutions;
};

int cmd_solve(const Options& o, std::ostream& log);
int cmd_certify(const Options& o, std::ostream& log);
int cmd_verify(const Options& o, std::ostream& log);
int cmd_study(const Options& o, std::ostream& log);

/// Runs `fn`, mapping every exception onto the exit-code contract with a
/// one-line diagnostic on `log`.
int guarded(const char* command, int (*fn)(const Options&, std::ostream&), const Options& o, std::ostream& log);

}  // namespace psys::cli
