#pragma once

// Deterministic synthetic images and dumps. All content comes from
// SplitMix64, so a (shape, seed) pair reproduces byte-identical output in
// any language:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "minifs/bytes.hpp"
#include "minifs/packer.hpp"
#include "minifs/scanner.hpp"

namespace minifs {

__extension__ using Uint128 = unsigned __int128;

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound) by multiply-shift; bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<Uint128>(next()) * bound) >> 64);
  }

  Bytes bytes(std::size_t n);
  void fill(std::uint8_t* out, std::size_t n);

 private:
  std::uint64_t state_;
};

struct FixtureSpec {
  std::string shape;  // "minimal", "paper-like", "multi-chunk"
  std::uint64_t seed = 0;
};

struct ManifestFile {
  std::string path;
  std::uint32_t size = 0;
  std::uint32_t chunk_index = 0;

  bool operator==(const ManifestFile&) const = default;
};

struct ManifestSection {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  std::string label;  // low | high | empty | minifs

  bool operator==(const ManifestSection&) const = default;
};

/// Ground truth recorded while building, never by parsing.
struct Manifest {
  std::string shape;
  std::uint64_t seed = 0;
  std::uint64_t dump_length = 0;
  std::uint64_t magic_offset = 0;
  std::uint64_t image_length = 0;
  std::uint32_t chunk_count = 0;
  std::vector<ManifestFile> files;
  std::vector<ManifestSection> sections;

  bool operator==(const Manifest&) const = default;
};

struct Fixture {
  Bytes dump;
  Manifest manifest;
  std::vector<PackEntry> entries;  // packed contents, in image order
};

/// Throws UnknownShape.
Fixture make_fixture(const FixtureSpec& spec);

void write_manifest(std::ostream& out, const Manifest& manifest);
Manifest read_manifest(std::istream& in);

}  // namespace minifs
