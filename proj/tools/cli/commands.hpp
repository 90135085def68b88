#pragma once

#include <iosfwd>

namespace polyinf::cli {

enum ExitCode {
  kOk = 0,
  kInputError = 2,
  kEmptySet = 3,
  kNotInformative = 4,
  kInconclusive = 5,
  kUnsupported = 6,
  kVerificationFailed = 7,
};

/// Runs one command line. Normal output goes to `out` unless --out names a
/// file; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polyinf::cli
