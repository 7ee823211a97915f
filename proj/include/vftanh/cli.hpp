#pragma once

#include <iosfwd>
#include <string_view>

#include "vftanh/fxnum.hpp"

namespace vftanh::cli {

enum ExitCode : int { kSuccess = 0, kDomainError = 1, kUsageError = 2 };

/// "s3.12" -> (signed, 3, 12); "s.15" -> (signed, 0, 15); "u0.18" -> (unsigned, 0, 18).
/// The sign letter is optional (defaults to signed). Throws ConfigError naming the token.
QFormat parse_format(std::string_view text);

/// Entry point behind the `vftanh` binary. Subcommands: gen-lut, sweep,
/// table2, compare, eval.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vftanh::cli
