#pragma once

// Test-only helpers and oracles. Nothing here calls into the code paths the
// oracles are used to check.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "minifs/bytes.hpp"
#include "minifs/fixtures.hpp"
#include "minifs/packer.hpp"

namespace minifs::test {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("minifs-test-" + std::to_string(rd()) + "-" + std::to_string(++counter));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline Bytes slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void spit(const fs::path& p, ByteView data) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

/// Every regular file below `root`, keyed by '/'-joined relative path.
inline std::map<std::string, Bytes> snapshot_tree(const fs::path& root) {
  std::map<std::string, Bytes> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  }
  return files;
}

inline std::map<std::string, Bytes> as_map(const std::vector<PackEntry>& entries) {
  std::map<std::string, Bytes> m;
  for (const auto& e : entries) m[e.path] = e.data;
  return m;
}

/// Byte-by-byte substring search.
inline std::vector<std::uint64_t> naive_find(ByteView hay, std::string_view needle) {
  std::vector<std::uint64_t> out;
  if (hay.size() < needle.size()) return out;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size() && match; ++k) {
      match = hay[i + k] == static_cast<std::uint8_t>(needle[k]);
    }
    if (match) out.push_back(i);
  }
  return out;
}

/// Entropy as log2(n) - (1/n) * sum(c * log2 c), a different arrangement of
/// the Shannon sum than the library uses.
inline double histogram_entropy(ByteView bytes) {
  std::map<std::uint8_t, std::uint64_t> counts;
  for (auto b : bytes) ++counts[b];
  const double n = static_cast<double>(bytes.size());
  double acc = 0.0;
  for (const auto& [v, c] : counts) acc += static_cast<double>(c) * std::log2(static_cast<double>(c));
  return std::log2(n) - acc / n;
}

/// Random tree: up to `max_files` files, directory depth <= `max_depth`,
/// each file <= `max_size` bytes with a mix of random, text and zero content.
inline std::vector<PackEntry> random_tree(SplitMix64& rng, std::size_t max_files, std::size_t max_depth,
                                          std::size_t max_size) {
  static constexpr std::string_view kParts[] = {"fw", "mtk", "web", "js", "css", "img", "cfg", "bin", "lib", "etc"};
  std::map<std::string, Bytes> files;
  const std::size_t n = rng.below(max_files + 1);
  while (files.size() < n) {
    std::string path;
    const std::size_t depth = rng.below(max_depth + 1);
    for (std::size_t d = 0; d < depth; ++d) path += std::string(kParts[rng.below(std::size(kParts))]) + "/";
    path += "f" + std::to_string(rng.below(100000)) + (rng.below(2) ? ".js" : ".bin");
    // A file name may not also be a directory on the way to another file.
    bool clash = false;
    for (const auto& [p, _] : files) {
      if (p.rfind(path + "/", 0) == 0 || path.rfind(p + "/", 0) == 0) clash = true;
    }
    if (clash || files.count(path)) continue;
    const std::size_t size = rng.below(2) ? rng.below(max_size + 1) : rng.below(std::min<std::size_t>(max_size, 2048) + 1);
    Bytes data;
    switch (rng.below(3)) {
      case 0: data = rng.bytes(size); break;
      case 1:
        data.resize(size);
        for (auto& b : data) b = static_cast<std::uint8_t>('a' + rng.below(6));
        break;
      default: data.assign(size, 0); break;
    }
    files[path] = std::move(data);
  }
  std::vector<PackEntry> out;
  for (auto& [p, d] : files) out.push_back({p, std::move(d)});
  return out;
}

}  // namespace minifs::test

#include "minifs/codec.hpp"
#include "minifs/format.hpp"

namespace minifs::test {

/// Assembles an image from raw tables, bypassing the packer's name checks.
/// Each element of `chunk_data` becomes one compressed chunk.
inline Bytes craft_image(std::string_view pool, const std::vector<FileRecord>& records,
                         const std::vector<Bytes>& chunk_data) {
  MiniFsHeader h;
  h.file_count = static_cast<std::uint32_t>(records.size());
  h.name_table_size = static_cast<std::uint32_t>(pool.size());
  const auto head = encode_header(h);
  Bytes img(head.begin(), head.end());
  img.insert(img.end(), pool.begin(), pool.end());
  for (const auto& r : records) append_file_record(img, r);
  std::vector<Bytes> packed;
  for (const auto& d : chunk_data) packed.push_back(compress_chunk(d));
  std::uint32_t off = 0;
  for (std::size_t i = 0; i < packed.size(); ++i) {
    append_chunk_record(img, ChunkRecord{off, static_cast<std::uint32_t>(packed[i].size()),
                                         static_cast<std::uint32_t>(chunk_data[i].size())});
    off += static_cast<std::uint32_t>(packed[i].size());
  }
  for (const auto& p : packed) img.insert(img.end(), p.begin(), p.end());
  return img;
}

/// Every path below `root` canonicalizes to somewhere inside it.
inline bool all_inside(const fs::path& root) {
  const auto croot = fs::canonical(root).generic_string() + "/";
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    const auto c = fs::weakly_canonical(e.path()).generic_string();
    if (c.rfind(croot, 0) != 0) return false;
  }
  return true;
}

}  // namespace minifs::test
