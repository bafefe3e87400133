#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "minifs/bytes.hpp"
#include "minifs/format.hpp"

namespace minifs {

enum class VersionHint { V2, V1Legacy, Unknown };

std::string_view to_string(VersionHint v) noexcept;

/// Summary of a magic hit whose header and tables decode inside the dump.
struct HitSummary {
  MiniFsHeader header;
  FsLayout layout;
  std::uint64_t end = 0;  // one past the last byte of the instance
};

struct MagicHit {
  std::uint64_t offset = 0;
  VersionHint version_hint = VersionHint::Unknown;
  std::optional<HitSummary> summary;  // empty when the header/tables do not parse

  bool parseable() const noexcept { return summary.has_value(); }
};

/// Every occurrence of "MINIFS", overlapping ones included, ascending.
std::vector<MagicHit> find_magic(ByteView dump);

enum class SectionLabel { Low, High, Empty, Mixed };

std::string_view to_string(SectionLabel label) noexcept;

struct Section {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  SectionLabel label = SectionLabel::Low;
  double mean_entropy = 0.0;
  std::optional<MagicHit> minifs;
};

struct SectionProfile {
  std::uint32_t block_size = 0;
  std::uint64_t dump_length = 0;
  std::vector<double> entropies;  // bits per byte, one per block
  // The byte value when a block is one repeated byte.
  std::vector<std::optional<std::uint8_t>> uniform_bytes;
  std::vector<Section> sections;
};

inline constexpr std::uint32_t kDefaultBlockSize = 1024;
inline constexpr double kDefaultHighThreshold = 7.5;
inline constexpr std::uint8_t kDefaultEmptyByte = 0xFF;

/// Shannon entropy in bits per byte of `bytes`; 0 for an empty span.
double shannon_entropy(ByteView bytes);

/// Per-block entropies; the final partial block covers its actual length.
/// Throws EmptyInput, or InvalidArgument unless block_size is a power of two >= 16.
SectionProfile entropy_profile(ByteView dump, std::uint32_t block_size = kDefaultBlockSize);

/// Labels every block and merges equal neighbours into maximal runs.
SectionProfile segment_sections(SectionProfile profile, double high_threshold = kDefaultHighThreshold,
                                std::uint8_t empty_byte = kDefaultEmptyByte);

struct ScanOptions {
  std::uint32_t block_size = kDefaultBlockSize;
  double high_threshold = kDefaultHighThreshold;
  std::uint8_t empty_byte = kDefaultEmptyByte;
};

struct DumpReport {
  std::uint64_t dump_length = 0;
  ScanOptions options;
  std::vector<MagicHit> hits;
  SectionProfile profile;  // entropies plus the block-level sections
  // Final sections: parseable MiniFS instances are carved out as their own
  // sections (label Mixed when they span blocks of different labels).
  std::vector<Section> sections;
};

DumpReport dump_report(ByteView dump, const ScanOptions& options = {});

}  // namespace minifs
