#include "wmod/error.hpp"

namespace wmod {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorKind::ZeroRow: return "ZeroRow";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::WeightSumInvalid: return "WeightSumInvalid";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::InvalidNode: return "InvalidNode";
    case ErrorKind::NotCohesive: return "NotCohesive";
    case ErrorKind::DegreeTooLarge: return "DegreeTooLarge";
    case ErrorKind::TooManyNodes: return "TooManyNodes";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::IncompleteReport: return "IncompleteReport";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::MissingRound: return "MissingRound";
    case ErrorKind::AllZeroDifferences: return "AllZeroDifferences";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace wmod
