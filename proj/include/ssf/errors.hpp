#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ssf {

// Every failure raised by the library carries one of these kinds. The C API
// maps them one-to-one onto ssf_status codes.
enum class ErrorKind {
  InvalidInput = 1,
  SpectrumHit,
  BranchCutHit,
  QuadratureFailure,
  SingularValue,
  ExtrapolationUnstable,
  SingularWeyl,
  TailTooFat,
  GridMismatch,
  NeumannEigenvalueHit,
  DirichletEigenvalueHit,
  OdeSolveFailure,
  SingularFactor,
  RootFindingFailure,
  BranchViolation,
  SignPathMismatch,
};

std::string_view error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Input/validation problems as opposed to numerical breakdowns.
  bool is_input_error() const noexcept { return kind_ == ErrorKind::InvalidInput; }

 private:
  ErrorKind kind_;
};

}  // namespace ssf
