#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gapbound {

enum class ErrorKind {
  InvalidArgument,
  InvalidInterval,
  NonConvergent,
  NoSignChange,
  NonFinite,
  RootNotFound,
  InvalidTestFunction,
  NonSymmetric,
  NonPositiveWeights,
  DegenerateQ,
  MissingBoundaryValue,
  TooLarge,
  EigensolveFailure,
  StepTooLarge,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gapbound
