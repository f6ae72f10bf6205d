#pragma once

// Subcommands behind the fklab binary. Kept in the library so tests can drive
// them without spawning processes.
//
// Exit codes: 0 success, 1 a verification check failed, 2 usage or spec error.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

namespace fklab {

struct RunConfig {
  std::string command;  // verify-observable | verify-harmonic | sample | experiment | enumerate
  std::string spec_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int threads = 1;
  std::optional<double> layer_rate;  // overrides the spec's "layer_rate"
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. Progress goes to `log`, diagnostics to `err`.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Runs jobs 0..count-1 on `threads` workers; job(i) must only touch slot i.
void parallel_for(int count, int threads, const std::function<void(int)>& job);

}  // namespace fklab
