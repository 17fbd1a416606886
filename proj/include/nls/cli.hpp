#pragma once

namespace nls {

// Command-line entry point. Exit codes: 0 success, 1 validation/usage
// error, 2 runtime or solver error.
int run_cli(int argc, char** argv);

}  // namespace nls
