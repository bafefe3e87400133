#include "minifs/scanner.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>

#include "minifs/codec.hpp"
#include "minifs/error.hpp"

namespace minifs {

namespace {

// Decodes header and tables at `base` without validating their contents.
std::optional<HitSummary> probe_instance(ByteView dump, std::uint64_t base) {
  try {
    if (base > dump.size() || dump.size() - base < kHeaderSize) return std::nullopt;
    HitSummary s;
    s.header = parse_header(dump.subspan(base, kHeaderSize));

    const std::uint64_t files_at = base + kHeaderSize + s.header.name_table_size;
    const std::uint64_t files_len = std::uint64_t{s.header.file_count} * kFileRecordSize;
    if (files_at + files_len > dump.size()) return std::nullopt;
    std::uint32_t chunk_count = 0;
    if (s.header.file_count > 0) {
      auto files = parse_file_table(dump.subspan(files_at, files_len), s.header.file_count);
      chunk_count = infer_chunk_count(files);
    }
    s.layout = compute_layout(s.header, chunk_count, base);
    const std::uint64_t chunks_len = std::uint64_t{chunk_count} * kChunkRecordSize;
    if (s.layout.chunk_table_start + chunks_len > dump.size()) return std::nullopt;
    auto chunks = parse_chunk_table(dump.subspan(s.layout.chunk_table_start, chunks_len), chunk_count);

    s.end = s.layout.data_start;
    for (const ChunkRecord& c : chunks) {
      s.end = std::max<std::uint64_t>(s.end, s.layout.data_start + c.data_offset + c.compressed_size);
    }
    s.end = std::min<std::uint64_t>(s.end, dump.size());
    return s;
  } catch (const Error&) {
    return std::nullopt;
  }
}

VersionHint version_of_first_chunk(ByteView dump, const HitSummary& s) {
  if (s.layout.chunk_count == 0) return VersionHint::Unknown;
  const std::uint64_t record_at = s.layout.chunk_table_start;
  const std::uint64_t chunk_at = s.layout.data_start + load_be32(&dump[record_at]);
  if (chunk_at + 4 > dump.size()) return VersionHint::Unknown;
  try {
    return check_config_word(dump.subspan(chunk_at, 4)) == FormatVersion::V2 ? VersionHint::V2
                                                                               : VersionHint::V1Legacy;
  } catch (const Error&) {
    return VersionHint::Unknown;
  }
}

struct BlockStats {
  double entropy = 0.0;
  std::optional<std::uint8_t> uniform;
};

BlockStats block_stats(ByteView bytes) {
  std::array<std::uint64_t, 256> counts{};
  for (std::uint8_t b : bytes) ++counts[b];
  BlockStats st;
  st.entropy = 0.0;
  const double n = static_cast<double>(bytes.size());
  for (std::size_t v = 0; v < counts.size(); ++v) {
    if (counts[v] == 0) continue;
    if (counts[v] == bytes.size()) st.uniform = static_cast<std::uint8_t>(v);
    const double p = static_cast<double>(counts[v]) / n;
    st.entropy -= p * std::log2(p);
  }
  st.entropy = std::clamp(st.entropy, 0.0, 8.0);
  return st;
}

SectionLabel label_for(double entropy, std::optional<std::uint8_t> uniform, double high_threshold,
                       std::uint8_t empty_byte) {
  if (uniform && *uniform == empty_byte) return SectionLabel::Empty;
  return entropy >= high_threshold ? SectionLabel::High : SectionLabel::Low;
}

}  // namespace

std::string_view to_string(VersionHint v) noexcept {
  switch (v) {
    case VersionHint::V2: return "v2";
    case VersionHint::V1Legacy: return "v1-legacy";
    case VersionHint::Unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(SectionLabel label) noexcept {
  switch (label) {
    case SectionLabel::Low: return "low";
    case SectionLabel::High: return "high";
    case SectionLabel::Empty: return "empty";
    case SectionLabel::Mixed: return "mixed";
  }
  return "unknown";
}

std::vector<MagicHit> find_magic(ByteView dump) {
  std::vector<MagicHit> hits;
  const auto magic = as_bytes(kMagic);
  const std::boyer_moore_horspool_searcher searcher(magic.begin(), magic.end());
  auto it = dump.begin();
  while (true) {
    auto found = std::search(it, dump.end(), searcher);
    if (found == dump.end()) break;
    MagicHit hit;
    hit.offset = static_cast<std::uint64_t>(found - dump.begin());
    hit.summary = probe_instance(dump, hit.offset);
    if (hit.summary) hit.version_hint = version_of_first_chunk(dump, *hit.summary);
    hits.push_back(std::move(hit));
    it = found + 1;
  }
  return hits;
}

double shannon_entropy(ByteView bytes) { return bytes.empty() ? 0.0 : block_stats(bytes).entropy; }

SectionProfile entropy_profile(ByteView dump, std::uint32_t block_size) {
  if (dump.empty()) throw Error(ErrorCode::EmptyInput, "cannot profile an empty dump");
  if (block_size < 16 || !std::has_single_bit(block_size)) {
    throw Error(ErrorCode::InvalidArgument, "block size " + std::to_string(block_size) +
                                                " must be a power of two >= 16");
  }
  SectionProfile p;
  p.block_size = block_size;
  p.dump_length = dump.size();
  const std::size_t blocks = (dump.size() + block_size - 1) / block_size;
  p.entropies.reserve(blocks);
  p.uniform_bytes.reserve(blocks);
  for (std::size_t i = 0; i < blocks; ++i) {
    const std::size_t start = i * block_size;
    auto st = block_stats(dump.subspan(start, std::min<std::size_t>(block_size, dump.size() - start)));
    p.entropies.push_back(st.entropy);
    p.uniform_bytes.push_back(st.uniform);
  }
  return p;
}

SectionProfile segment_sections(SectionProfile profile, double high_threshold, std::uint8_t empty_byte) {
  profile.sections.clear();
  double weighted = 0.0;
  for (std::size_t i = 0; i < profile.entropies.size(); ++i) {
    const std::uint64_t start = std::uint64_t{i} * profile.block_size;
    const std::uint64_t end = std::min<std::uint64_t>(start + profile.block_size, profile.dump_length);
    const SectionLabel label = label_for(profile.entropies[i], profile.uniform_bytes[i], high_threshold, empty_byte);
    if (profile.sections.empty() || profile.sections.back().label != label) {
      if (!profile.sections.empty()) {
        auto& prev = profile.sections.back();
        prev.mean_entropy = weighted / static_cast<double>(prev.end - prev.start);
      }
      profile.sections.push_back({start, end, label, 0.0, std::nullopt});
      weighted = 0.0;
    }
    profile.sections.back().end = end;
    weighted += profile.entropies[i] * static_cast<double>(end - start);
  }
  if (!profile.sections.empty()) {
    auto& last = profile.sections.back();
    last.mean_entropy = weighted / static_cast<double>(last.end - last.start);
  }
  return profile;
}

DumpReport dump_report(ByteView dump, const ScanOptions& options) {
  DumpReport report;
  report.dump_length = dump.size();
  report.options = options;
  report.hits = find_magic(dump);
  if (dump.empty()) return report;

  report.profile = segment_sections(entropy_profile(dump, options.block_size), options.high_threshold,
                                    options.empty_byte);

  // Non-overlapping instance extents, first hit wins.
  std::vector<const MagicHit*> carved;
  std::uint64_t covered = 0;
  for (const MagicHit& h : report.hits) {
    if (!h.parseable() || h.offset < covered) continue;
    carved.push_back(&h);
    covered = h.summary->end;
  }

  // Units: blocks, split further wherever an instance starts or ends. A unit
  // that is a whole block reuses the block's statistics.
  struct Unit {
    std::uint64_t start, end;
    double entropy;
    SectionLabel label;
    std::ptrdiff_t extent;  // index into carved, or -1
  };
  std::vector<std::uint64_t> cuts;
  for (const MagicHit* h : carved) {
    cuts.push_back(h->offset);
    cuts.push_back(h->summary->end);
  }
  std::vector<Unit> units;
  const std::uint32_t bs = options.block_size;
  for (std::size_t b = 0; b < report.profile.entropies.size(); ++b) {
    const std::uint64_t bstart = std::uint64_t{b} * bs;
    const std::uint64_t bend = std::min<std::uint64_t>(bstart + bs, dump.size());
    std::vector<std::uint64_t> edges{bstart};
    for (std::uint64_t c : cuts) {
      if (c > bstart && c < bend) edges.push_back(c);
    }
    std::sort(edges.begin(), edges.end());
    edges.push_back(bend);
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      Unit u{edges[k], edges[k + 1], 0.0, SectionLabel::Low, -1};
      if (edges.size() == 2) {
        u.entropy = report.profile.entropies[b];
        u.label = label_for(u.entropy, report.profile.uniform_bytes[b], options.high_threshold, options.empty_byte);
      } else {
        auto st = block_stats(dump.subspan(u.start, u.end - u.start));
        u.entropy = st.entropy;
        u.label = label_for(st.entropy, st.uniform, options.high_threshold, options.empty_byte);
      }
      for (std::size_t e = 0; e < carved.size(); ++e) {
        if (u.start >= carved[e]->offset && u.end <= carved[e]->summary->end) u.extent = static_cast<std::ptrdiff_t>(e);
      }
      units.push_back(u);
    }
  }

  double weighted = 0.0;
  std::ptrdiff_t current_extent = -2;
  auto close = [&] {
    if (report.sections.empty()) return;
    auto& s = report.sections.back();
    s.mean_entropy = weighted / static_cast<double>(s.end - s.start);
  };
  for (const Unit& u : units) {
    bool extend = false;
    if (!report.sections.empty() && u.extent == current_extent) {
      auto& s = report.sections.back();
      if (u.extent >= 0) {
        if (s.label != u.label) s.label = SectionLabel::Mixed;
        extend = true;
      } else {
        extend = s.label == u.label;
      }
    }
    if (!extend) {
      close();
      weighted = 0.0;
      Section s{u.start, u.end, u.label, 0.0, std::nullopt};
      if (u.extent >= 0) s.minifs = *carved[static_cast<std::size_t>(u.extent)];
      report.sections.push_back(std::move(s));
      current_extent = u.extent;
    }
    report.sections.back().end = u.end;
    weighted += u.entropy * static_cast<double>(u.end - u.start);
  }
  close();
  return report;
}

}  // namespace minifs
