#include "textmag/error.hpp"

namespace textmag {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::MissingBOS: return "MissingBOS";
    case ErrorCode::InteriorSpecial: return "InteriorSpecial";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::FinishedText: return "FinishedText";
    case ErrorCode::OverCutoff: return "OverCutoff";
    case ErrorCode::MissingEntry: return "MissingEntry";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BadDistribution: return "BadDistribution";
    case ErrorCode::ReservedTokenInAlphabet: return "ReservedTokenInAlphabet";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotInCategory: return "NotInCategory";
    case ErrorCode::TooLargeForDense: return "TooLargeForDense";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::EmptySystem: return "EmptySystem";
    case ErrorCode::MissingTable: return "MissingTable";
    case ErrorCode::TooManyVertices: return "TooManyVertices";
    case ErrorCode::TooManyGenerators: return "TooManyGenerators";
    case ErrorCode::IncompleteTable: return "IncompleteTable";
    case ErrorCode::ZeroProbabilityStep: return "ZeroProbabilityStep";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::BadPMF: return "BadPMF";
  }
  return "Unknown";
}

}  // namespace textmag
