#include "minifs/format.hpp"

#include <algorithm>
#include <limits>

namespace minifs {

namespace {

constexpr std::size_t kReservedOffset = 0x06;
constexpr std::size_t kUnknownAOffset = 0x10;
constexpr std::size_t kFileCountOffset = 0x14;
constexpr std::size_t kUnknownBOffset = 0x18;
constexpr std::size_t kNameTableSizeOffset = 0x1C;

bool checked_add(std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
  return !__builtin_add_overflow(a, b, &out);
}

bool is_name_byte(std::uint8_t c) { return c >= 0x20 && c < 0x7F; }

}  // namespace

MiniFsHeader parse_header(ByteView bytes) {
  if (bytes.size() < kHeaderSize) {
    throw Error(ErrorCode::TruncatedTable,
                "header needs " + std::to_string(kHeaderSize) + " bytes, got " + std::to_string(bytes.size()));
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::BadMagic, "header does not start with \"MINIFS\"");
  }
  MiniFsHeader h;
  std::copy_n(bytes.begin() + kReservedOffset, h.reserved.size(), h.reserved.begin());
  h.unknown_a = load_be32(&bytes[kUnknownAOffset]);
  h.file_count = load_be32(&bytes[kFileCountOffset]);
  h.unknown_b = load_be32(&bytes[kUnknownBOffset]);
  h.name_table_size = load_be32(&bytes[kNameTableSizeOffset]);
  return h;
}

std::array<std::uint8_t, kHeaderSize> encode_header(const MiniFsHeader& header) {
  std::array<std::uint8_t, kHeaderSize> out{};
  std::copy(kMagic.begin(), kMagic.end(), out.begin());
  std::copy(header.reserved.begin(), header.reserved.end(), out.begin() + kReservedOffset);
  store_be32(&out[kUnknownAOffset], header.unknown_a);
  store_be32(&out[kFileCountOffset], header.file_count);
  store_be32(&out[kUnknownBOffset], header.unknown_b);
  store_be32(&out[kNameTableSizeOffset], header.name_table_size);
  return out;
}

std::string name_at(const NameTable& table, std::uint32_t offset) {
  const Bytes& pool = table.pool();
  if (offset >= pool.size()) {
    throw Error(ErrorCode::OffsetOutOfRange,
                "name offset " + std::to_string(offset) + " outside " + std::to_string(pool.size()) + "-byte pool");
  }
  auto first = pool.begin() + offset;
  auto nul = std::find(first, pool.end(), std::uint8_t{0});
  if (nul == pool.end()) {
    throw Error(ErrorCode::UnterminatedString, "name at offset " + std::to_string(offset) + " has no NUL");
  }
  if (auto bad = std::find_if_not(first, nul, is_name_byte); bad != nul) {
    throw Error(ErrorCode::NonAsciiName, "byte " + hex(*bad, 2) + " in name at offset " +
                                             std::to_string(offset + (bad - first)));
  }
  return std::string(first, nul);
}

std::vector<FileRecord> parse_file_table(ByteView bytes, std::uint32_t file_count) {
  if (bytes.size() / kFileRecordSize < file_count) {
    throw Error(ErrorCode::TruncatedTable, std::to_string(file_count) + " file records need " +
                                               std::to_string(std::uint64_t{file_count} * kFileRecordSize) +
                                               " bytes, got " + std::to_string(bytes.size()));
  }
  std::vector<FileRecord> out;
  out.reserve(file_count);
  for (std::uint32_t i = 0; i < file_count; ++i) {
    const std::uint8_t* p = bytes.data() + i * kFileRecordSize;
    out.push_back({load_be32(p), load_be32(p + 4), load_be32(p + 8), load_be32(p + 12), load_be32(p + 16)});
  }
  return out;
}

std::vector<ChunkRecord> parse_chunk_table(ByteView bytes, std::uint32_t chunk_count) {
  if (bytes.size() / kChunkRecordSize < chunk_count) {
    throw Error(ErrorCode::TruncatedTable, std::to_string(chunk_count) + " chunk records need " +
                                               std::to_string(std::uint64_t{chunk_count} * kChunkRecordSize) +
                                               " bytes, got " + std::to_string(bytes.size()));
  }
  std::vector<ChunkRecord> out;
  out.reserve(chunk_count);
  for (std::uint32_t i = 0; i < chunk_count; ++i) {
    const std::uint8_t* p = bytes.data() + i * kChunkRecordSize;
    out.push_back({load_be32(p), load_be32(p + 4), load_be32(p + 8)});
  }
  return out;
}

void append_file_record(Bytes& out, const FileRecord& r) {
  append_be32(out, r.path_offset);
  append_be32(out, r.name_offset);
  append_be32(out, r.chunk_index);
  append_be32(out, r.offset_in_chunk);
  append_be32(out, r.file_size);
}

void append_chunk_record(Bytes& out, const ChunkRecord& r) {
  append_be32(out, r.data_offset);
  append_be32(out, r.compressed_size);
  append_be32(out, r.decompressed_size);
}

std::uint32_t infer_chunk_count(std::span<const FileRecord> records) {
  if (records.empty()) {
    throw Error(ErrorCode::EmptyFileTable, "cannot infer chunk count from an empty file table");
  }
  const std::uint32_t last = records.back().chunk_index;
  if (last == std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::ArithmeticOverflow, "last chunk index 0xFFFFFFFF");
  }
  return last + 1;
}

FsLayout compute_layout(const MiniFsHeader& header, std::uint32_t chunk_count, std::uint64_t base) {
  FsLayout l;
  l.base = base;
  l.chunk_count = chunk_count;
  bool ok = checked_add(base, kHeaderSize, l.names_start) &&
            checked_add(l.names_start, header.name_table_size, l.files_start) &&
            checked_add(l.files_start, std::uint64_t{header.file_count} * kFileRecordSize, l.chunk_table_start) &&
            checked_add(l.chunk_table_start, std::uint64_t{chunk_count} * kChunkRecordSize, l.data_start);
  if (!ok) {
    throw Error(ErrorCode::ArithmeticOverflow, "layout offsets overflow for base " + std::to_string(base));
  }
  return l;
}

void check_safe_path(std::string_view dir, std::string_view name) {
  if (name.empty() || name == "." || name == "..") {
    throw Error(ErrorCode::UnsafePath, "invalid file name \"" + std::string(name) + "\"");
  }
  if (name.find('/') != std::string_view::npos) {
    throw Error(ErrorCode::UnsafePath, "file name \"" + std::string(name) + "\" contains '/'");
  }
  if (!dir.empty() && dir.front() == '/') {
    throw Error(ErrorCode::UnsafePath, "absolute directory \"" + std::string(dir) + "\"");
  }
  std::size_t pos = 0;
  while (pos <= dir.size()) {
    std::size_t next = dir.find('/', pos);
    if (next == std::string_view::npos) next = dir.size();
    if (dir.substr(pos, next - pos) == "..") {
      throw Error(ErrorCode::UnsafePath, "directory \"" + std::string(dir) + "\" contains '..'");
    }
    pos = next + 1;
  }
}

std::string full_path(const NameTable& table, const FileRecord& record) {
  std::string dir = name_at(table, record.path_offset);
  std::string name = name_at(table, record.name_offset);
  check_safe_path(dir, name);
  if (dir.empty()) return name;
  return dir + "/" + name;
}

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::PathOffsetOutOfRange: return "path-offset-out-of-range";
    case ViolationKind::NameOffsetOutOfRange: return "name-offset-out-of-range";
    case ViolationKind::BadName: return "bad-name";
    case ViolationKind::ChunkIndexOutOfRange: return "chunk-index-out-of-range";
    case ViolationKind::FileSpanExceedsChunk: return "file-span-exceeds-chunk";
    case ViolationKind::ChunkTooSmall: return "chunk-too-small";
    case ViolationKind::ChunkBeyondImage: return "chunk-beyond-image";
    case ViolationKind::ChunkCountMismatch: return "chunk-count-mismatch";
    case ViolationKind::TableSizeMismatch: return "table-size-mismatch";
  }
  return "unknown";
}

std::vector<Violation> validate_layout(const MiniFsHeader& header, const NameTable& names,
                                       std::span<const FileRecord> records,
                                       std::span<const ChunkRecord> chunks, const FsLayout& layout,
                                       std::uint64_t image_length) {
  std::vector<Violation> out;
  auto add = [&out](ViolationKind kind, std::optional<std::size_t> file, std::optional<std::size_t> chunk,
                    std::string detail, std::optional<ErrorCode> cause = std::nullopt) {
    out.push_back({kind, file, chunk, cause, std::move(detail)});
  };

  if (header.file_count != records.size() || header.name_table_size != names.size()) {
    add(ViolationKind::TableSizeMismatch, std::nullopt, std::nullopt,
        "header declares " + std::to_string(header.file_count) + " files / " +
            std::to_string(header.name_table_size) + "-byte names, tables hold " +
            std::to_string(records.size()) + " / " + std::to_string(names.size()));
  }

  for (std::size_t i = 0; i < records.size(); ++i) {
    const FileRecord& r = records[i];
    bool offsets_ok = true;
    if (r.path_offset >= names.size()) {
      add(ViolationKind::PathOffsetOutOfRange, i, std::nullopt, "path offset " + std::to_string(r.path_offset));
      offsets_ok = false;
    }
    if (r.name_offset >= names.size()) {
      add(ViolationKind::NameOffsetOutOfRange, i, std::nullopt, "name offset " + std::to_string(r.name_offset));
      offsets_ok = false;
    }
    if (offsets_ok) {
      try {
        (void)full_path(names, r);
      } catch (const Error& e) {
        add(ViolationKind::BadName, i, std::nullopt, e.what(), e.code());
      }
    }
    if (r.chunk_index >= chunks.size()) {
      add(ViolationKind::ChunkIndexOutOfRange, i, r.chunk_index,
          "chunk " + std::to_string(r.chunk_index) + " of " + std::to_string(chunks.size()));
    } else if (std::uint64_t{r.offset_in_chunk} + r.file_size > chunks[r.chunk_index].decompressed_size) {
      add(ViolationKind::FileSpanExceedsChunk, i, r.chunk_index,
          "span [" + std::to_string(r.offset_in_chunk) + ", +" + std::to_string(r.file_size) + ") exceeds " +
              std::to_string(chunks[r.chunk_index].decompressed_size) + " decompressed bytes");
    }
  }

  for (std::size_t j = 0; j < chunks.size(); ++j) {
    const ChunkRecord& c = chunks[j];
    if (c.compressed_size < kMinCompressedChunk) {
      add(ViolationKind::ChunkTooSmall, std::nullopt, j,
          "compressed size " + std::to_string(c.compressed_size) + " < " + std::to_string(kMinCompressedChunk));
    }
    const std::uint64_t end = layout.data_start + c.data_offset + c.compressed_size;
    if (end > image_length) {
      add(ViolationKind::ChunkBeyondImage, std::nullopt, j,
          "chunk ends at " + std::to_string(end) + ", image is " + std::to_string(image_length) + " bytes");
    }
  }

  // Records pointing past the table are already reported per record; what
  // remains is a table with trailing chunks no record references.
  std::uint64_t referenced = 0;
  for (const FileRecord& r : records) referenced = std::max<std::uint64_t>(referenced, std::uint64_t{r.chunk_index} + 1);
  if (referenced < chunks.size()) {
    add(ViolationKind::ChunkCountMismatch, std::nullopt, std::nullopt,
        "max(chunk_index)+1 = " + std::to_string(referenced) + " but chunk table holds " +
            std::to_string(chunks.size()));
  }
  return out;
}

}  // namespace minifs
