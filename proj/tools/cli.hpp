#pragma once

#include <string>
#include <vector>

namespace advscore::cli {

// Entry point behind the `advscore` binary, callable in-process for tests.
// Exit status: 0 on success, 1 on validation/usage errors, 2 on numerical
// failure.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args including argv[0]

}  // namespace advscore::cli
