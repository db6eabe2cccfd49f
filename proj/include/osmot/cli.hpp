#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace osmot {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Runs one command line (program name excluded). Subcommands: track, eval,
/// synth, ren-forward, saan-forward, loss, oracle.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace osmot
