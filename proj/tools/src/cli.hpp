#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdslab::cli {

enum ExitCode : int { kConclusive = 0, kError = 1, kInconclusive = 2 };

/// Runs one qdslab invocation. args excludes the program name. Reports go to
/// the --out path (written atomically) or to `out`; diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qdslab::cli
