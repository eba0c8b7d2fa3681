#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace embedshape {

enum class ErrorCode {
  Parse = 1,
  DegenerateInput,
  EmptyInput,
  InvalidMatrix,
  InconsistentComplex,
  DegreeMismatch,
  Config,
  InsufficientLeaves,
  InvalidTree,
  LabelMismatch,
  DegenerateCorrelation,
  Io,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message, std::size_t line = 0);
  /// 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

#define EMBEDSHAPE_DECLARE_ERROR(Name, Code)                              \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& message) : Error(Code, message) {}   \
  };

EMBEDSHAPE_DECLARE_ERROR(DegenerateInputError, ErrorCode::DegenerateInput)
EMBEDSHAPE_DECLARE_ERROR(EmptyInputError, ErrorCode::EmptyInput)
EMBEDSHAPE_DECLARE_ERROR(InvalidMatrixError, ErrorCode::InvalidMatrix)
EMBEDSHAPE_DECLARE_ERROR(InconsistentComplexError, ErrorCode::InconsistentComplex)
EMBEDSHAPE_DECLARE_ERROR(DegreeMismatchError, ErrorCode::DegreeMismatch)
EMBEDSHAPE_DECLARE_ERROR(ConfigError, ErrorCode::Config)
EMBEDSHAPE_DECLARE_ERROR(InsufficientLeavesError, ErrorCode::InsufficientLeaves)
EMBEDSHAPE_DECLARE_ERROR(InvalidTreeError, ErrorCode::InvalidTree)
EMBEDSHAPE_DECLARE_ERROR(LabelMismatchError, ErrorCode::LabelMismatch)
EMBEDSHAPE_DECLARE_ERROR(DegenerateCorrelationError, ErrorCode::DegenerateCorrelation)
EMBEDSHAPE_DECLARE_ERROR(IoError, ErrorCode::Io)

#undef EMBEDSHAPE_DECLARE_ERROR

// Rethrows `e` as the same concrete error type with `context` prepended.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context);

// Throws the concrete error type matching `code`.
[[noreturn]] void throw_error(ErrorCode code, const std::string& message);

}  // namespace embedshape
