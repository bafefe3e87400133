#include "minifs/report.hpp"

#include <cstdio>
#include <ostream>

namespace minifs {

namespace {

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string reserved_hex(const MiniFsHeader& h) {
  std::string s;
  for (std::uint8_t b : h.reserved) s += hex(b, 2).substr(2);
  return s;
}

}  // namespace

void write_dump_report(std::ostream& out, const DumpReport& r, OutputFormat format) {
  if (format == OutputFormat::Machine) {
    out << "dump length=" << r.dump_length << " block_size=" << r.options.block_size
        << " high_threshold=" << fixed(r.options.high_threshold, 6) << " empty_byte=" << hex(r.options.empty_byte, 2)
        << " sections=" << r.sections.size() << " hits=" << r.hits.size() << '\n';
    for (const MagicHit& h : r.hits) {
      out << "hit offset=" << hex(h.offset) << " parseable=" << (h.parseable() ? 1 : 0)
          << " version=" << to_string(h.version_hint) << '\n';
    }
    for (std::size_t i = 0; i < r.sections.size(); ++i) {
      const Section& s = r.sections[i];
      out << "section index=" << i << " start=" << hex(s.start) << " end=" << hex(s.end)
          << " label=" << to_string(s.label) << " mean_entropy=" << fixed(s.mean_entropy, 6);
      if (s.minifs) {
        const HitSummary& h = *s.minifs->summary;
        out << " minifs_base=" << hex(s.minifs->offset) << " version=" << to_string(s.minifs->version_hint)
            << " files=" << h.header.file_count << " name_table=" << h.header.name_table_size
            << " chunks=" << h.layout.chunk_count;
      }
      out << '\n';
    }
    return;
  }

  if (r.sections.empty()) {
    out << "no sections\n";
    return;
  }
  out << "dump: " << r.dump_length << " bytes, block " << r.options.block_size << ", high entropy >= "
      << fixed(r.options.high_threshold, 2) << " bits/byte\n";
  for (std::size_t i = 0; i < r.sections.size(); ++i) {
    const Section& s = r.sections[i];
    out << "  [" << i << "] " << hex(s.start, 8) << "-" << hex(s.end, 8) << "  " << to_string(s.label) << "  "
        << fixed(s.mean_entropy, 2);
    if (s.minifs) out << "  minifs";
    out << '\n';
  }
  bool any = false;
  for (const MagicHit& h : r.hits) {
    if (!h.parseable()) {
      out << "magic string @ " << hex(h.offset) << " (not a parseable header)\n";
      continue;
    }
    any = true;
    out << "minifs @ " << hex(h.offset) << " (" << to_string(h.version_hint) << ", " << h.summary->header.file_count
        << " files, " << h.summary->layout.chunk_count << " chunks, " << h.summary->end - h.offset << " bytes)\n";
  }
  if (!any) out << "no MiniFS instance found\n";
}

void write_entropy_csv(std::ostream& out, const SectionProfile& profile) {
  out << "offset,entropy\n";
  for (std::size_t i = 0; i < profile.entropies.size(); ++i) {
    out << std::uint64_t{i} * profile.block_size << ',' << fixed(profile.entropies[i], 6) << '\n';
  }
}

void write_header_summary(std::ostream& out, std::uint64_t base, const MiniFsHeader& h, OutputFormat format) {
  if (format == OutputFormat::Machine) {
    out << "header base=" << hex(base) << " files=" << h.file_count << " name_table=" << h.name_table_size
        << " unknown_a=" << hex(h.unknown_a, 8) << " unknown_b=" << hex(h.unknown_b, 8)
        << " reserved=" << reserved_hex(h) << '\n';
    return;
  }
  out << "minifs @ " << hex(base) << '\n'
      << "files: " << h.file_count << ", name table: " << h.name_table_size << " bytes\n"
      << "unknown word @0x10: " << hex(h.unknown_a, 8) << '\n'
      << "unknown word @0x18: " << hex(h.unknown_b, 8) << '\n'
      << "reserved 0x06-0x0f: " << reserved_hex(h) << '\n';
}

void write_categories(std::ostream& out, const CategoryCounts& counts, OutputFormat format) {
  for (const auto& [category, n] : counts) {
    if (format == OutputFormat::Machine) {
      out << "category name=" << to_string(category) << " count=" << n << '\n';
    } else {
      out << "  " << to_string(category) << ": " << n << '\n';
    }
  }
}

void write_extract_report(std::ostream& out, const ExtractReport& r, OutputFormat format) {
  const bool machine = format == OutputFormat::Machine;
  for (const ExtractedFile& f : r.files) {
    const bool ok = f.status == FileStatus::Written;
    if (machine) {
      out << "file index=" << f.index << " size=" << f.size << " chunk=" << f.chunk_index
          << " status=" << (ok ? "ok" : "failed");
      if (f.error) out << " error=" << to_string(*f.error);
      out << " path=" << f.path << '\n';
      if (!ok) out << "error index=" << f.index << " message=" << f.message << '\n';
    } else {
      out << (ok ? "  ok      " : "  FAILED  ") << f.path;
      if (!ok) out << "  (" << f.message << ")";
      out << '\n';
    }
  }
  for (const std::string& w : r.warnings) {
    out << (machine ? "warning message=" : "warning: ") << w << '\n';
  }
  if (machine) {
    out << "summary files=" << r.files.size() << " written=" << r.written << " failed=" << r.failed
        << " bytes=" << r.total_bytes << " chunks=" << r.chunk_count << " decompressed=" << r.chunks_decompressed
        << '\n';
  } else {
    out << r.written << " of " << r.files.size() << " files written (" << r.total_bytes << " bytes), " << r.failed
        << " failed, " << r.chunks_decompressed << " of " << r.chunk_count << " chunks decompressed\n";
    if (!r.categories.empty()) out << "file types:\n";
  }
  write_categories(out, r.categories, format);
}

}  // namespace minifs
