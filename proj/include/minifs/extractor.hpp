#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "minifs/bytes.hpp"
#include "minifs/codec.hpp"
#include "minifs/error.hpp"
#include "minifs/format.hpp"

namespace minifs {

class ChunkCache;

/// Raised by open_view when validation finds problems and force is off.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

struct ViewOptions {
  bool force = false;
  DecodeOptions decode;
  // Decompressed bytes kept by the chunk cache; 0 means unbounded.
  std::uint64_t cache_budget = 0;
};

/// A parsed MiniFS instance over borrowed dump bytes. The dump must outlive
/// the view.
class MiniFsView {
 public:
  const MiniFsHeader& header() const noexcept { return header_; }
  const FsLayout& layout() const noexcept { return layout_; }
  const NameTable& names() const noexcept { return names_; }
  const std::vector<FileRecord>& files() const noexcept { return files_; }
  const std::vector<ChunkRecord>& chunks() const noexcept { return chunks_; }
  ByteView source() const noexcept { return source_; }
  const std::vector<Violation>& violations() const noexcept { return violations_; }
  const ViewOptions& options() const noexcept { return options_; }

  /// Compressed bytes of chunk `index`; throws TruncatedImage if they run
  /// past the dump.
  ByteView chunk_bytes(std::size_t index) const;

  /// Decompressed chunk through the view's cache.
  std::shared_ptr<const Bytes> chunk(std::size_t index) const;
  std::uint64_t chunk_decompressions() const noexcept;

 private:
  friend MiniFsView open_view(ByteView dump, std::uint64_t base, const ViewOptions& options);

  MiniFsHeader header_;
  FsLayout layout_;
  NameTable names_;
  std::vector<FileRecord> files_;
  std::vector<ChunkRecord> chunks_;
  ByteView source_;
  std::vector<Violation> violations_;
  ViewOptions options_;
  std::shared_ptr<ChunkCache> cache_;
};

/// Parses and validates the instance whose magic sits at `base`.
/// Throws BadMagic, TruncatedImage, or ValidationError (unless options.force).
MiniFsView open_view(ByteView dump, std::uint64_t base, const ViewOptions& options = {});

struct FileEntry {
  std::size_t index = 0;
  std::string path;
  std::uint32_t chunk_index = 0;
  std::uint32_t offset_in_chunk = 0;
  std::uint32_t file_size = 0;
};

/// One entry per record in table order. A record whose name does not resolve
/// raises that error, prefixed with the record index.
std::vector<FileEntry> list_files(const MiniFsView& view);

using Selector = std::variant<std::size_t, std::string>;

/// Throws NotFound, AmbiguousPath, or whatever the codec raises.
Bytes read_file(const MiniFsView& view, const Selector& selector);

enum class FileStatus { Written, Failed };

struct ExtractedFile {
  std::size_t index = 0;
  std::string path;  // relative to out_dir, after any .dupN renaming
  std::uint32_t size = 0;
  std::uint32_t chunk_index = 0;
  FileStatus status = FileStatus::Written;
  std::optional<ErrorCode> error;
  std::string message;
};

enum class FileCategory { Css, Html, Js, Image, Key, Config, Binary };

std::string_view to_string(FileCategory category) noexcept;

using CategoryCounts = std::map<FileCategory, std::size_t>;

struct ExtractReport {
  std::vector<ExtractedFile> files;  // ordered by file index
  std::uint64_t total_bytes = 0;     // bytes written
  std::size_t chunk_count = 0;
  std::size_t chunks_decompressed = 0;
  std::size_t written = 0;
  std::size_t failed = 0;
  std::vector<std::string> warnings;
  CategoryCounts categories;  // over written files
};

struct ExtractOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Decompresses every referenced chunk once and writes each file under
/// out_dir. Per-file failures are recorded; only an unusable out_dir throws.
ExtractReport extract_all(const MiniFsView& view, const std::filesystem::path& out_dir,
                          const ExtractOptions& options = {});

/// Category from content sniffing (PEM markers, image signatures) first,
/// then the file extension.
FileCategory classify(std::string_view path, ByteView leading_bytes);

struct NamedContent {
  std::string path;
  ByteView contents;
};

CategoryCounts classify_files(std::span<const NamedContent> files);

}  // namespace minifs
