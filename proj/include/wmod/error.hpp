#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wmod {

enum class ErrorKind {
  NonSquare,
  NegativeEntry,
  NonFiniteEntry,
  ZeroRow,
  ParseError,
  IoError,
  ConfigInvalid,
  DimensionMismatch,
  WeightSumInvalid,
  EmptyInput,
  EmptySet,
  InvalidNode,
  NotCohesive,
  DegreeTooLarge,
  TooManyNodes,
  NonFiniteState,
  IncompleteReport,
  InsufficientData,
  MissingRound,
  AllZeroDifferences,
};

std::string_view to_string(ErrorKind kind);

/// Every library failure is reported through this exception; `kind()` tells
/// callers which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wmod
