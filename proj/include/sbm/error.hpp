#pragma once

#include <stdexcept>
#include <string>

namespace sbm {

// Numeric codes match the CLI exit codes.
enum class ErrorKind { config = 1, validation = 2, numeric = 3, argument = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorKind::validation, w) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorKind::numeric, w) {}
};
struct ArgumentError : Error {
  explicit ArgumentError(const std::string& w) : Error(ErrorKind::argument, w) {}
};

}  // namespace sbm
