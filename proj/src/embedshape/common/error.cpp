#include "embedshape/common/error.hpp"

namespace embedshape {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::DegenerateInput: return "DegenerateInputError";
    case ErrorCode::EmptyInput: return "EmptyInputError";
    case ErrorCode::InvalidMatrix: return "InvalidMatrixError";
    case ErrorCode::InconsistentComplex: return "InconsistentComplexError";
    case ErrorCode::DegreeMismatch: return "DegreeMismatchError";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::InsufficientLeaves: return "InsufficientLeavesError";
    case ErrorCode::InvalidTree: return "InvalidTreeError";
    case ErrorCode::LabelMismatch: return "LabelMismatchError";
    case ErrorCode::DegenerateCorrelation: return "DegenerateCorrelationError";
    case ErrorCode::Io: return "IoError";
  }
  return "Error";
}

ParseError::ParseError(const std::string& message, std::size_t line)
    : Error(ErrorCode::Parse,
            line == 0 ? message : "line " + std::to_string(line) + ": " + message),
      line_(line) {}

void throw_error(ErrorCode code, const std::string& message) {
  switch (code) {
    case ErrorCode::Parse: throw ParseError(message);
    case ErrorCode::DegenerateInput: throw DegenerateInputError(message);
    case ErrorCode::EmptyInput: throw EmptyInputError(message);
    case ErrorCode::InvalidMatrix: throw InvalidMatrixError(message);
    case ErrorCode::InconsistentComplex: throw InconsistentComplexError(message);
    case ErrorCode::DegreeMismatch: throw DegreeMismatchError(message);
    case ErrorCode::Config: throw ConfigError(message);
    case ErrorCode::InsufficientLeaves: throw InsufficientLeavesError(message);
    case ErrorCode::InvalidTree: throw InvalidTreeError(message);
    case ErrorCode::LabelMismatch: throw LabelMismatchError(message);
    case ErrorCode::DegenerateCorrelation: throw DegenerateCorrelationError(message);
    case ErrorCode::Io: throw IoError(message);
  }
  throw Error(code, message);
}

void rethrow_with_context(const Error& e, const std::string& context) {
  if (auto* pe = dynamic_cast<const ParseError*>(&e)) {
    throw ParseError(context + ": " + pe->what());
  }
  throw_error(e.code(), context + ": " + e.what());
}

}  // namespace embedshape
