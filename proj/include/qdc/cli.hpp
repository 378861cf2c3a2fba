#pragma once

#include <string>
#include <vector>

namespace qdc {

/// Entry point of the command-line tool. Returns 0 on success, 2 on
/// validation/usage errors, 3 on analysis failures.
int run_command(int argc, const char* const* argv);

/// Every long option name the command-line surface exposes, across all
/// subcommands (used to keep the documentation in sync).
std::vector<std::string> cli_flag_names();

}  // namespace qdc
