#pragma once

#include <stdexcept>
#include <string>

namespace inls {

// Process exit codes are derived from the error kind (see tools/inls_lab.cpp).
enum class ErrorKind {
  validation = 1,
  solver = 2,
  io = 3,
  verification = 4,
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
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

struct SolverError : Error {
  explicit SolverError(const std::string& what) : Error(ErrorKind::solver, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

// A certified identity or constraint did not hold.
struct VerificationError : Error {
  explicit VerificationError(const std::string& what) : Error(ErrorKind::verification, what) {}
};

// Raised when a field holds NaN/Inf; the numerical signature of blow-up or
// loss of resolution.
struct BlowupSignal : Error {
  explicit BlowupSignal(const std::string& what) : Error(ErrorKind::solver, what) {}
};

// Ground-state iteration did not reach tolerance; carries the last residual.
struct IterationLimitError : SolverError {
  IterationLimitError(const std::string& what, double last_residual)
      : SolverError(what), last_residual(last_residual) {}
  double last_residual;
};

}  // namespace inls
