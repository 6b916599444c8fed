#pragma once

#include <stdexcept>
#include <string>

namespace corpusforge {

// Failure classes map one-to-one onto the CLI exit codes.
enum class ErrorKind {
  kContract = 1,  // precondition or configuration violated
  kIo = 2,        // file missing, unreadable or unwritable
  kData = 3,      // malformed input records
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error ContractError(const std::string& message) {
  return Error(ErrorKind::kContract, message);
}
inline Error IoError(const std::string& message) {
  return Error(ErrorKind::kIo, message);
}
inline Error DataError(const std::string& message) {
  return Error(ErrorKind::kData, message);
}

}  // namespace corpusforge
