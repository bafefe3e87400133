#include "minifs/codec.hpp"

#include <lzma.h>

#include <algorithm>
#include <memory>

#include "minifs/error.hpp"

namespace minifs {

namespace {

constexpr std::uint32_t kDictionarySize = 8u << 20;
// Enough for any dictionary a 0x5D000080 stream can declare, with headroom.
constexpr std::uint64_t kDecoderMemLimit = 256ull << 20;

struct StreamDeleter {
  void operator()(lzma_stream* s) const {
    lzma_end(s);
    delete s;
  }
};
using StreamPtr = std::unique_ptr<lzma_stream, StreamDeleter>;

StreamPtr new_stream() { return StreamPtr(new lzma_stream(LZMA_STREAM_INIT)); }

constexpr std::size_t kAloneHeaderSize = 13;  // properties, dictionary size, uncompressed size
constexpr std::uint64_t kUnknownSize = ~0ull;

struct DecodeResult {
  lzma_ret ret;
  std::uint64_t produced;
  std::size_t input_left;
};

DecodeResult run_decoder(ByteView stream, Bytes& out) {
  auto strm = new_stream();
  if (lzma_alone_decoder(strm.get(), kDecoderMemLimit) != LZMA_OK) {
    throw Error(ErrorCode::CorruptStream, "cannot initialise LZMA decoder");
  }
  strm->next_in = stream.data();
  strm->avail_in = stream.size();
  strm->next_out = out.data();
  strm->avail_out = out.size();
  lzma_ret ret;
  do {
    ret = lzma_code(strm.get(), LZMA_FINISH);
  } while (ret == LZMA_OK && strm->avail_out > 0);
  return {ret, strm->total_out, strm->avail_in};
}

std::string word_string(ByteView chunk) {
  std::string s;
  for (std::size_t i = 0; i < std::min<std::size_t>(chunk.size(), 4); ++i) {
    if (i) s += ' ';
    s += hex(chunk[i], 2).substr(2);
  }
  return s.empty() ? "<empty>" : s;
}

}  // namespace

std::string_view to_string(FormatVersion v) noexcept {
  switch (v) {
    case FormatVersion::V2: return "v2";
    case FormatVersion::V1Legacy: return "v1-legacy";
  }
  return "unknown";
}

FormatVersion check_config_word(ByteView chunk) {
  if (chunk.size() >= 4) {
    if (std::equal(kConfigWordV2.begin(), kConfigWordV2.end(), chunk.begin())) return FormatVersion::V2;
    if (std::equal(kConfigWordV1.begin(), kConfigWordV1.end(), chunk.begin())) return FormatVersion::V1Legacy;
  }
  throw Error(ErrorCode::UnknownConfigWord, "chunk starts with " + word_string(chunk));
}

Bytes decompress_chunk(ByteView chunk, std::uint32_t expected_size, const DecodeOptions& options) {
  if (check_config_word(chunk) != FormatVersion::V2) {
    throw Error(ErrorCode::UnsupportedVersion, "legacy v1 chunks are identified but not decoded");
  }
  if (expected_size > options.max_output) {
    throw Error(ErrorCode::ChunkTooLarge, std::to_string(expected_size) + " bytes exceeds the " +
                                              std::to_string(options.max_output) + "-byte chunk limit");
  }
  if (chunk.size() < kAloneHeaderSize) {
    throw Error(ErrorCode::CorruptStream, "chunk of " + std::to_string(chunk.size()) +
                                              " bytes is shorter than an LZMA header");
  }
  std::uint64_t declared = 0;
  for (int i = 7; i >= 0; --i) declared = (declared << 8) | chunk[5 + i];
  const bool known = declared != kUnknownSize;
  if (known && declared != expected_size) {
    throw Error(ErrorCode::SizeMismatch, "stream header declares " + std::to_string(declared) +
                                             " bytes, chunk table says " + std::to_string(expected_size));
  }

  // One spare byte distinguishes "exactly expected_size" from "more".
  Bytes out(std::size_t{expected_size} + 1);
  DecodeResult r = run_decoder(chunk, out);

  if (known && r.ret == LZMA_DATA_ERROR && r.produced == expected_size) {
    // A declared size followed by an end marker. Accept it only if the
    // marker itself decodes cleanly.
    Bytes patched(chunk.begin(), chunk.end());
    std::fill_n(patched.begin() + 5, 8, std::uint8_t{0xFF});
    r = run_decoder(patched, out);
  }

  switch (r.ret) {
    case LZMA_STREAM_END:
      break;
    case LZMA_OK:
      // Output buffer full and the stream still going.
      throw Error(ErrorCode::SizeMismatch, "stream decodes past the expected " + std::to_string(expected_size) +
                                               " bytes");
    case LZMA_BUF_ERROR:
      // Input exhausted without an end marker: acceptable only if the
      // external size is already satisfied.
      if (r.produced == expected_size && r.input_left == 0) break;
      throw Error(ErrorCode::CorruptStream, "stream truncated after " + std::to_string(r.produced) + " of " +
                                                std::to_string(expected_size) + " bytes");
    case LZMA_MEMLIMIT_ERROR:
      throw Error(ErrorCode::CorruptStream, "stream declares a dictionary above the decoder memory limit");
    default:
      throw Error(ErrorCode::CorruptStream,
                  "LZMA decoder error " + std::to_string(static_cast<int>(r.ret)) + " after " +
                      std::to_string(r.produced) + " bytes");
  }
  if (r.produced != expected_size) {
    throw Error(ErrorCode::SizeMismatch, "decoded " + std::to_string(r.produced) + " bytes, chunk table says " +
                                             std::to_string(expected_size));
  }
  out.resize(r.produced);
  return out;
}

Bytes compress_chunk(ByteView data, const EncodeOptions& options) {
  lzma_options_lzma opt;
  std::uint32_t preset = std::min<std::uint32_t>(options.preset, 9);
  if (options.extreme) preset |= LZMA_PRESET_EXTREME;
  if (lzma_lzma_preset(&opt, preset)) {
    throw Error(ErrorCode::EncodeError, "unsupported preset " + std::to_string(options.preset));
  }
  opt.dict_size = kDictionarySize;

  auto strm = new_stream();
  if (lzma_alone_encoder(strm.get(), &opt) != LZMA_OK) {
    throw Error(ErrorCode::EncodeError, "cannot initialise LZMA encoder");
  }

  Bytes out(data.size() + data.size() / 8 + 256);
  strm->next_in = data.data();
  strm->avail_in = data.size();
  strm->next_out = out.data();
  strm->avail_out = out.size();

  for (;;) {
    lzma_ret ret = lzma_code(strm.get(), LZMA_FINISH);
    if (ret == LZMA_STREAM_END) break;
    if (ret != LZMA_OK) {
      throw Error(ErrorCode::EncodeError, "LZMA encoder error " + std::to_string(static_cast<int>(ret)));
    }
    if (strm->avail_out == 0) {
      const std::size_t used = out.size();
      out.resize(used * 2);
      strm->next_out = out.data() + used;
      strm->avail_out = out.size() - used;
    }
  }
  out.resize(strm->total_out);

  if (out.size() < 4 || !std::equal(kConfigWordV2.begin(), kConfigWordV2.end(), out.begin())) {
    throw Error(ErrorCode::EncodeError, "encoder produced configuration word " + word_string(out));
  }
  return out;
}

}  // namespace minifs
