#include "ssinr/harness/exit_codes.hpp"

#include "ssinr/error.hpp"

namespace ssinr::harness {

ExitCode exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericError*>(&e) != nullptr) return kExitNumericAbort;
  return kExitConfigError;
}

}  // namespace ssinr::harness
