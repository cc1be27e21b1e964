#pragma once

#include <string>
#include <vector>

namespace eazy {

// Entry point behind the `eazy` binary. Subcommands: train, predict, eval,
// bench, synth. Exit status: 0 success, 1 usage error, 2 data/format error,
// 3 numerical failure.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace eazy
