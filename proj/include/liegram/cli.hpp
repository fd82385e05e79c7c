#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace liegram {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

// Entry point of the `liegram` command line; args exclude the program name.
// Subcommands: simulate, analyze, check-sensor.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace liegram
