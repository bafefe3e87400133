#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minifs/bytes.hpp"
#include "minifs/codec.hpp"
#include "minifs/format.hpp"

namespace minifs {

struct NamePool {
  Bytes pool;
  // (path_offset, name_offset) per input entry.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> offsets;
};

/// Directory strings first (first-use order), then file names; every
/// distinct string is stored once.
NamePool build_name_pool(std::span<const std::pair<std::string, std::string>> entries);

struct ChunkGroup {
  std::vector<std::size_t> members;  // entry indices
  std::vector<std::uint32_t> offsets;  // per member, within the chunk
  std::uint32_t decompressed_size = 0;
};

/// First-fit in entry order: a new chunk starts whenever the next file would
/// push the current one past `max_chunk_decompressed`.
std::vector<ChunkGroup> plan_chunks(std::span<const std::uint32_t> file_sizes, std::uint32_t max_chunk_decompressed);

inline constexpr std::uint32_t kDefaultMaxChunk = 0x60000;

struct PackEntry {
  std::string path;  // '/'-separated, relative
  Bytes data;
};

struct PackOptions {
  std::uint32_t max_chunk_decompressed = kDefaultMaxChunk;
  bool preserve_order = false;  // otherwise sorted by full path
  bool mimic_vendor = false;    // word at 0x18 = first file's size
  std::optional<std::uint32_t> unknown_a;
  std::optional<std::uint32_t> unknown_b;
  EncodeOptions encode;
  unsigned threads = 0;  // 0 = hardware concurrency
};

Bytes pack(std::vector<PackEntry> entries, const PackOptions& options = {});

/// Regular files below `root`, paths relative with '/' separators.
std::vector<PackEntry> read_tree(const std::filesystem::path& root);

Bytes pack_directory(const std::filesystem::path& root, const PackOptions& options = {});

}  // namespace minifs
