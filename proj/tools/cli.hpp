#pragma once

#include <iosfwd>

namespace krein::cli {

/// Runs the command-line tool. Returns 0 when every check passes, 1 when
/// some check fails and 2 on malformed input or configuration.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace krein::cli
