#pragma once

#include <stdexcept>
#include <string>

namespace casematch {

// Error taxonomy used across the toolkit. CLI exit codes: validation-type
// errors map to 1, runtime/training errors to 2.
enum class ErrorKind {
  kParse,
  kValidation,
  kConfig,
  kContract,
  kState,
  kTransport,
  kProtocol,
  kTraining,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  const char* kind_name() const {
    switch (kind_) {
      case ErrorKind::kParse: return "parse";
      case ErrorKind::kValidation: return "validation";
      case ErrorKind::kConfig: return "config";
      case ErrorKind::kContract: return "contract";
      case ErrorKind::kState: return "state";
      case ErrorKind::kTransport: return "transport";
      case ErrorKind::kProtocol: return "protocol";
      case ErrorKind::kTraining: return "training";
    }
    return "unknown";
  }

  int exit_code() const {
    switch (kind_) {
      case ErrorKind::kParse:
      case ErrorKind::kValidation:
      case ErrorKind::kConfig:
      case ErrorKind::kContract:
        return 1;
      default:
        return 2;
    }
  }

 private:
  ErrorKind kind_;
};

}  // namespace casematch
