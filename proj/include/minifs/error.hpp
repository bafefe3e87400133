#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace minifs {

enum class ErrorCode {
  BadMagic,
  TruncatedTable,
  TruncatedImage,
  OffsetOutOfRange,
  UnterminatedString,
  NonAsciiName,
  UnsafePath,
  EmptyFileTable,
  ArithmeticOverflow,
  UnknownConfigWord,
  UnsupportedVersion,
  CorruptStream,
  SizeMismatch,
  ChunkTooLarge,
  EncodeError,
  EmptyInput,
  InvalidArgument,
  ValidationFailed,
  NotFound,
  AmbiguousPath,
  IoError,
  NameTooAdversarial,
  FileTooLarge,
  UnknownShape,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library is an Error carrying a code that
// callers (and the CLI's exit-code mapping) can switch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace minifs
