#pragma once

// MiniFS v2 on-disk structures.
//
//   base + 0                      32-byte header ("MINIFS" magic)
//   base + 32                     Table of Names (NUL-separated ASCII pool)
//   names_start + name_table_size Table of Files (20-byte records)
//   files_start + 20 * files      Table of Chunks (12-byte records)
//   chunk_table_start + 12 * ch.  LZMA chunks, back to back
//
// Every multi-byte field is a big-endian uint32.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "minifs/bytes.hpp"
#include "minifs/error.hpp"

namespace minifs {

inline constexpr std::string_view kMagic = "MINIFS";
inline constexpr std::size_t kHeaderSize = 32;
inline constexpr std::size_t kFileRecordSize = 20;
inline constexpr std::size_t kChunkRecordSize = 12;
inline constexpr std::size_t kMinCompressedChunk = 5;

struct MiniFsHeader {
  std::array<std::uint8_t, 10> reserved{};  // 0x06..0x0F, opaque
  std::uint32_t unknown_a = 0;              // 0x10, opaque
  std::uint32_t file_count = 0;             // 0x14
  std::uint32_t unknown_b = 0;              // 0x18, opaque
  std::uint32_t name_table_size = 0;        // 0x1C

  bool operator==(const MiniFsHeader&) const = default;
};

/// Decodes the first 32 bytes of `bytes`. Throws BadMagic or TruncatedTable.
MiniFsHeader parse_header(ByteView bytes);
std::array<std::uint8_t, kHeaderSize> encode_header(const MiniFsHeader& header);

/// String pool addressed by byte offset from its first byte.
class NameTable {
 public:
  NameTable() = default;
  explicit NameTable(Bytes pool) : pool_(std::move(pool)) {}

  const Bytes& pool() const noexcept { return pool_; }
  std::size_t size() const noexcept { return pool_.size(); }

 private:
  Bytes pool_;
};

/// The printable-ASCII string starting at `offset`, up to the next NUL.
std::string name_at(const NameTable& table, std::uint32_t offset);

struct FileRecord {
  std::uint32_t path_offset = 0;
  std::uint32_t name_offset = 0;
  std::uint32_t chunk_index = 0;
  std::uint32_t offset_in_chunk = 0;
  std::uint32_t file_size = 0;

  bool operator==(const FileRecord&) const = default;
};

struct ChunkRecord {
  std::uint32_t data_offset = 0;  // relative to FsLayout::data_start
  std::uint32_t compressed_size = 0;
  std::uint32_t decompressed_size = 0;

  bool operator==(const ChunkRecord&) const = default;
};

std::vector<FileRecord> parse_file_table(ByteView bytes, std::uint32_t file_count);
std::vector<ChunkRecord> parse_chunk_table(ByteView bytes, std::uint32_t chunk_count);
void append_file_record(Bytes& out, const FileRecord& record);
void append_chunk_record(Bytes& out, const ChunkRecord& record);

/// Chunk count per the last-record rule: the final record's chunk index + 1.
/// Throws EmptyFileTable on an empty table.
std::uint32_t infer_chunk_count(std::span<const FileRecord> records);

struct FsLayout {
  std::uint64_t base = 0;
  std::uint64_t names_start = 0;
  std::uint64_t files_start = 0;
  std::uint64_t chunk_table_start = 0;
  std::uint64_t data_start = 0;
  std::uint32_t chunk_count = 0;

  bool operator==(const FsLayout&) const = default;
};

/// Region starts for an instance whose magic sits at `base`.
/// Throws ArithmeticOverflow if an offset does not fit in 64 bits.
FsLayout compute_layout(const MiniFsHeader& header, std::uint32_t chunk_count, std::uint64_t base);

/// "path/name", or just "name" for files in the root. Rejects traversal
/// components, absolute paths and separators inside the name (UnsafePath).
std::string full_path(const NameTable& table, const FileRecord& record);

/// The (directory, name) policy full_path enforces; throws UnsafePath.
void check_safe_path(std::string_view dir, std::string_view name);

enum class ViolationKind {
  PathOffsetOutOfRange,
  NameOffsetOutOfRange,
  BadName,
  ChunkIndexOutOfRange,
  FileSpanExceedsChunk,
  ChunkTooSmall,
  ChunkBeyondImage,
  ChunkCountMismatch,
  TableSizeMismatch,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::optional<std::size_t> file_index;
  std::optional<std::size_t> chunk_index;
  // Set for BadName: the naming error full_path raised.
  std::optional<ErrorCode> cause;
  std::string detail;
};

/// Cross-checks decoded tables against each other and the image length.
/// An empty result means the instance is well formed.
std::vector<Violation> validate_layout(const MiniFsHeader& header, const NameTable& names,
                                       std::span<const FileRecord> records,
                                       std::span<const ChunkRecord> chunks, const FsLayout& layout,
                                       std::uint64_t image_length);

}  // namespace minifs
