#pragma once

namespace subsetforge::cli {

// Full command-line entry point; main() is a one-line wrapper so tests can
// drive the tool in-process. Returns the process exit status: 0 success,
// 1 usage error, 2 data/runtime error.
int run(int argc, const char* const* argv);

}  // namespace subsetforge::cli
