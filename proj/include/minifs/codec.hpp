#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "minifs/bytes.hpp"

namespace minifs {

enum class FormatVersion { V2, V1Legacy };

std::string_view to_string(FormatVersion v) noexcept;

// Leading 4 bytes of every compressed chunk. For v2 this is the LZMA
// properties byte 0x5D (lc=3, lp=0, pb=2) followed by the low three bytes of
// the little-endian dictionary size (8 MiB).
inline constexpr std::array<std::uint8_t, 4> kConfigWordV2{0x5D, 0x00, 0x00, 0x80};
inline constexpr std::array<std::uint8_t, 4> kConfigWordV1{0x5A, 0x00, 0x00, 0x80};

/// Throws UnknownConfigWord (naming the bytes seen) for anything else.
FormatVersion check_config_word(ByteView chunk);

struct DecodeOptions {
  std::uint64_t max_output = 64ull << 20;
};

/// Decodes an LZMA-alone chunk and enforces `expected_size` as the exact
/// output length. Both the embedded-size and unknown-size header variants are
/// accepted; at most expected_size + 1 bytes are ever produced.
Bytes decompress_chunk(ByteView chunk, std::uint32_t expected_size, const DecodeOptions& options = {});

struct EncodeOptions {
  // liblzma preset level 0-9; the dictionary is always pinned to 8 MiB so the
  // stream header carries the v2 configuration word.
  std::uint32_t preset = 1;
  bool extreme = false;
};

/// Encodes `data` as an unknown-size LZMA-alone stream with end marker.
Bytes compress_chunk(ByteView data, const EncodeOptions& options = {});

}  // namespace minifs
