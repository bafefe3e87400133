#pragma once

#include <iosfwd>

#include "minifs/extractor.hpp"
#include "minifs/scanner.hpp"

namespace minifs {

// Machine output is line oriented: a record type word followed by
// space-separated key=value tokens. A free-form value (a path or message) is
// always the last token on its line. No timestamps, so identical inputs give
// byte-identical reports.
enum class OutputFormat { Human, Machine };

void write_dump_report(std::ostream& out, const DumpReport& report, OutputFormat format);

/// Two columns, block start offset and entropy, with a header row.
void write_entropy_csv(std::ostream& out, const SectionProfile& profile);

void write_header_summary(std::ostream& out, std::uint64_t base, const MiniFsHeader& header, OutputFormat format);

void write_extract_report(std::ostream& out, const ExtractReport& report, OutputFormat format);

void write_categories(std::ostream& out, const CategoryCounts& counts, OutputFormat format);

}  // namespace minifs
