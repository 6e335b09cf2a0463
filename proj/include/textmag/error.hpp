#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace textmag {

enum class ErrorCode {
  InvalidArgument,
  // texts
  Empty,
  MissingBOS,
  InteriorSpecial,
  UnknownToken,
  // models
  FinishedText,
  OverCutoff,
  MissingEntry,
  ParseError,
  BadDistribution,
  ReservedTokenInAlphabet,
  // categories / matrices
  TooLarge,
  NotInCategory,
  TooLargeForDense,
  SingularMatrix,
  EmptyGrid,
  EmptySystem,
  MissingTable,
  // digraphs
  TooManyVertices,
  // homology
  TooManyGenerators,
  IncompleteTable,
  // metrics
  ZeroProbabilityStep,
  TooShort,
  BadPMF,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace textmag
