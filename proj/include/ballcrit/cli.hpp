#pragma once

#include <iosfwd>

namespace ballcrit {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitNonconvergence = 3,
  kExitGeometry = 4,
  kExitUsage = 5,
  kExitIo = 6,
};

/// Entry point behind the `ballcrit` binary; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ballcrit
