#pragma once

#include <exception>

namespace ssinr::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailure = 1,
  kExitConfigError = 2,
  kExitNumericAbort = 3,
};

// Numeric errors map to kExitNumericAbort; everything else (bad flags,
// unreadable or unsupported files, invalid values) to kExitConfigError.
ExitCode exit_code_for(const std::exception& e);

}  // namespace ssinr::harness
