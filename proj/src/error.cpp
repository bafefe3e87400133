#include "minifs/error.hpp"

namespace minifs {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedTable: return "TruncatedTable";
    case ErrorCode::TruncatedImage: return "TruncatedImage";
    case ErrorCode::OffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorCode::UnterminatedString: return "UnterminatedString";
    case ErrorCode::NonAsciiName: return "NonAsciiName";
    case ErrorCode::UnsafePath: return "UnsafePath";
    case ErrorCode::EmptyFileTable: return "EmptyFileTable";
    case ErrorCode::ArithmeticOverflow: return "ArithmeticOverflow";
    case ErrorCode::UnknownConfigWord: return "UnknownConfigWord";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::CorruptStream: return "CorruptStream";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::ChunkTooLarge: return "ChunkTooLarge";
    case ErrorCode::EncodeError: return "EncodeError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::AmbiguousPath: return "AmbiguousPath";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NameTooAdversarial: return "NameTooAdversarial";
    case ErrorCode::FileTooLarge: return "FileTooLarge";
    case ErrorCode::UnknownShape: return "UnknownShape";
  }
  return "Unknown";
}

}  // namespace minifs
