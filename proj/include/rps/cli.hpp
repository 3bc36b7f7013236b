#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace rps {

// Exit-code contract: 0 success, 2 config/condition error, 3 divergence,
// 4 order assertion failed, 5 Floquet logarithm failure.
enum ExitCode {
  kExitOk = 0,
  kExitConfig = 2,
  kExitDivergence = 3,
  kExitAssertion = 4,
  kExitFloquetLog = 5,
};

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;  // 0 = hardware concurrency
  double assert_order = std::nan("");
  double band = std::nan("");
  std::uint64_t seed_offset = 0;
};

// Runs one of: simulate, converge, diagnose, measure, floquet. All output
// is written under opts.out_dir; diagnostics go to stderr. Returns the
// exit code and never throws.
int run_command(const std::string& command, const CliOptions& opts);

}  // namespace rps
