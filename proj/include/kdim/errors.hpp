#pragma once

#include <stdexcept>
#include <string>

namespace kdim {

// Exit status contract shared by the CLI: each error category maps to a
// stable process exit code.
enum class ErrorKind : int {
  validation = 2,
  precision = 3,
  budget = 4,
  insufficient_data = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::validation, what) {}
};

// Raised when a scan bound or expansion depth would exceed what the
// configured precision can resolve to 2^-32.
struct PrecisionError : Error {
  explicit PrecisionError(const std::string& what)
      : Error(ErrorKind::precision, what) {}
};

struct BudgetError : Error {
  explicit BudgetError(const std::string& what)
      : Error(ErrorKind::budget, what) {}
};

struct InsufficientDataError : Error {
  explicit InsufficientDataError(const std::string& what)
      : Error(ErrorKind::insufficient_data, what) {}
};

}  // namespace kdim
