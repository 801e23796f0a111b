#pragma once

#include <stdexcept>
#include <string>

namespace mecgear {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind {
  kInput = 2,
  kConvergence = 3,
  kIo = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::kInput, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

#define MECGEAR_REQUIRE(cond, msg)                   \
  do {                                               \
    if (!(cond)) throw ::mecgear::InputError(msg);   \
  } while (false)

}  // namespace mecgear
