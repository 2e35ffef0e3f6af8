#pragma once

#include <stdexcept>
#include <string>

namespace g2flow {

enum class ErrorKind {
  Parse,         // malformed input
  Precondition,  // mathematical precondition violated
  Residual,      // a solver could not reach its residual target
};

/// Single exception type for the library. `stage` names the operation that
/// failed so front ends can report it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), kind_(kind), stage_(std::move(stage)), detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }
  /// The message without the stage prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string stage_;
  std::string detail_;
};

[[noreturn]] inline void fail_precondition(const std::string& stage, const std::string& message) {
  throw Error(ErrorKind::Precondition, stage, message);
}

[[noreturn]] inline void fail_residual(const std::string& stage, const std::string& message) {
  throw Error(ErrorKind::Residual, stage, message);
}

[[noreturn]] inline void fail_parse(const std::string& stage, const std::string& message) {
  throw Error(ErrorKind::Parse, stage, message);
}

}  // namespace g2flow
