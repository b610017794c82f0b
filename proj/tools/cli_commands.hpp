#pragma once

namespace blocknys::cli {

// Parses argv, runs the selected subcommand, and returns the process exit
// code: 0 when every reported check passed, 1 when a check failed, 2 on
// configuration or runtime errors.
int run(int argc, char** argv);

}  // namespace blocknys::cli
