#pragma once

#include <iosfwd>
#include <string>

#include "nitireward/error.hpp"
#include "nitireward/eval.hpp"

namespace nitireward {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitUpstream = 4,
  kExitInput = 5,
};

int exit_code(ErrorKind kind) noexcept;

// Metric rows with mean and SD columns, four decimals.
std::string report_table(const RunAggregate& aggregate);

/// Entry point of the nitireward tool. Subcommands: serve, score, evaluate,
/// retrieve, build-prompt, embed-corpus, toy-train, stats.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nitireward
