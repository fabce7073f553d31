#pragma once

#include <ostream>

namespace seqprod {

/// Exit codes of the command-line interface.
inline constexpr int kExitPass = 0;
inline constexpr int kExitPropertyFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `seqprod` tool, with output streams injected.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seqprod
