#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ssinr {

// A precondition of a public operation was not met (shape mismatch, invalid
// hyperparameter, missing forward cache, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Computation produced or consumed a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The finite-difference oracle saw a non-finite objective value.
class OracleFailure : public NumericError {
 public:
  OracleFailure(std::size_t index, const std::string& what)
      : NumericError(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Training aborted because loss or gradients went non-finite.
class TrainingAborted : public NumericError {
 public:
  TrainingAborted(std::size_t epoch, const std::string& what)
      : NumericError(what), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

// Inconsistent or incomplete run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A signal file could not be decoded (unsupported format, bit depth, layout).
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { NotACheckpoint, VersionMismatch, UnexpectedEnd, Malformed, Io };

  CheckpointError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace ssinr
