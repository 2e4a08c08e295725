#pragma once

#include <iosfwd>

namespace ssocert::cli {

enum ExitCode : int { kComputed = 0, kInputError = 1, kInternalError = 2 };

/// Entry point of the ssocert tool. The report goes to --report or, when
/// absent, to `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ssocert::cli
