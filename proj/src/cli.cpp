#include "minifs/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "minifs/codec.hpp"
#include "minifs/extractor.hpp"
#include "minifs/fixtures.hpp"
#include "minifs/packer.hpp"
#include "minifs/report.hpp"
#include "minifs/scanner.hpp"

namespace minifs::cli {

namespace {

// Carries a specific exit code out of a command.
struct Exit {
  int code;
  std::string message;
};

struct Config {
  std::string input;
  std::string output;
  std::string base;
  std::string selector;
  std::optional<std::size_t> index;
  std::uint32_t block_size = kDefaultBlockSize;
  double threshold = kDefaultHighThreshold;
  std::string empty_byte = "0xff";
  bool force = false;
  bool entropy_csv = false;
  std::string format = "human";
  unsigned threads = 0;
  // pack
  std::uint32_t max_chunk = kDefaultMaxChunk;
  bool preserve_order = false;
  bool sorted = false;
  bool mimic_vendor = false;
  std::string unknown_a;
  std::string unknown_b;
  std::uint32_t preset = EncodeOptions{}.preset;
  // fixture
  std::string shape;
  std::uint64_t seed = 0;
  std::string manifest;
};

std::uint64_t parse_number(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(text, &used, 0);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Exit{kExitUsage, std::string("invalid ") + what + " \"" + text + "\""};
}

std::uint32_t parse_word(const std::string& text, const char* what) {
  const std::uint64_t v = parse_number(text, what);
  if (v > 0xFFFFFFFFull) throw Exit{kExitUsage, std::string(what) + " does not fit in 32 bits"};
  return static_cast<std::uint32_t>(v);
}

Bytes read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path);
  return data;
}

void write_output(const std::string& path, ByteView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
}

OutputFormat format_of(const Config& c) { return c.format == "machine" ? OutputFormat::Machine : OutputFormat::Human; }

std::uint64_t resolve_base(ByteView dump, const Config& c) {
  if (!c.base.empty()) return parse_number(c.base, "base offset");
  std::vector<std::uint64_t> parseable;
  std::vector<std::uint64_t> raw;
  for (const MagicHit& h : find_magic(dump)) {
    (h.parseable() ? parseable : raw).push_back(h.offset);
  }
  auto list = [](const std::vector<std::uint64_t>& v) {
    std::string s;
    for (auto o : v) s += (s.empty() ? "" : ", ") + hex(o);
    return s;
  };
  if (parseable.empty()) {
    std::string msg = "no parseable MiniFS instance in " + c.input;
    if (!raw.empty()) msg += " (magic string at " + list(raw) + "; pass --base to force one)";
    throw Exit{kExitNoMiniFs, msg};
  }
  if (parseable.size() > 1) {
    throw Exit{kExitUsage, "several MiniFS instances at " + list(parseable) + "; choose one with --base"};
  }
  return parseable.front();
}

ViewOptions view_options(const Config& c) {
  ViewOptions o;
  o.force = c.force;
  return o;
}

int cmd_scan(const Config& c, std::ostream& out) {
  const Bytes dump = read_input(c.input);
  ScanOptions opts;
  opts.block_size = c.block_size;
  opts.high_threshold = c.threshold;
  const std::uint64_t empty = parse_number(c.empty_byte, "empty byte");
  if (empty > 0xFF) throw Exit{kExitUsage, "empty byte must be 0-255"};
  opts.empty_byte = static_cast<std::uint8_t>(empty);
  const DumpReport report = dump_report(dump, opts);
  if (c.entropy_csv) {
    if (!report.profile.entropies.empty()) write_entropy_csv(out, report.profile);
  } else {
    write_dump_report(out, report, format_of(c));
  }
  for (const MagicHit& h : report.hits) {
    if (h.parseable()) return kExitOk;
  }
  return kExitNoMiniFs;
}

int cmd_entropy(const Config& c, std::ostream& out) {
  const Bytes dump = read_input(c.input);
  write_entropy_csv(out, entropy_profile(dump, c.block_size));
  return kExitOk;
}

int cmd_info(const Config& c, std::ostream& out) {
  const Bytes dump = read_input(c.input);
  const std::uint64_t base = resolve_base(dump, c);
  if (base > dump.size() || dump.size() - base < kHeaderSize) {
    throw Error(ErrorCode::TruncatedImage, "no 32-byte header at " + hex(base));
  }
  const MiniFsHeader header = parse_header(ByteView(dump).subspan(base, kHeaderSize));
  const OutputFormat fmt = format_of(c);
  write_header_summary(out, base, header, fmt);
  try {
    ViewOptions o;
    o.force = true;
    const MiniFsView view = open_view(dump, base, o);
    const FsLayout& l = view.layout();
    if (fmt == OutputFormat::Machine) {
      out << "layout names=" << hex(l.names_start) << " files=" << hex(l.files_start)
          << " chunk_table=" << hex(l.chunk_table_start) << " data=" << hex(l.data_start)
          << " chunks=" << l.chunk_count << " violations=" << view.violations().size() << '\n';
    } else {
      out << "chunks: " << l.chunk_count << '\n'
          << "table of names @ " << hex(l.names_start) << '\n'
          << "table of files @ " << hex(l.files_start) << '\n'
          << "table of chunks @ " << hex(l.chunk_table_start) << '\n'
          << "chunk data @ " << hex(l.data_start) << '\n'
          << "violations: " << view.violations().size() << '\n';
    }
  } catch (const Error& e) {
    out << (fmt == OutputFormat::Machine ? "layout unavailable=" : "layout unavailable: ") << e.what() << '\n';
  }
  return kExitOk;
}

int cmd_ls(const Config& c, std::ostream& out) {
  const Bytes dump = read_input(c.input);
  const MiniFsView view = open_view(dump, resolve_base(dump, c), view_options(c));
  const bool machine = format_of(c) == OutputFormat::Machine;
  for (std::size_t i = 0; i < view.files().size(); ++i) {
    const FileRecord& r = view.files()[i];
    std::string path;
    try {
      path = full_path(view.names(), r);
    } catch (const Error& e) {
      path = std::string("<") + e.what() + ">";
    }
    if (machine) {
      out << "entry index=" << i << " size=" << r.file_size << " chunk=" << r.chunk_index
          << " offset=" << r.offset_in_chunk << " path=" << path << '\n';
    } else {
      char line[64];
      std::snprintf(line, sizeof line, "%6zu %10u %6u  ", i, r.file_size, r.chunk_index);
      out << line << path << '\n';
    }
  }
  return kExitOk;
}

int cmd_cat(const Config& c, std::ostream& out) {
  if (c.index && !c.selector.empty()) throw Exit{kExitUsage, "give either a path or --index, not both"};
  if (!c.index && c.selector.empty()) throw Exit{kExitUsage, "cat needs a path or --index"};
  const Bytes dump = read_input(c.input);
  const MiniFsView view = open_view(dump, resolve_base(dump, c), view_options(c));
  const Bytes data = c.index ? read_file(view, *c.index) : read_file(view, c.selector);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  return kExitOk;
}

int cmd_extract(const Config& c, std::ostream& out) {
  const Bytes dump = read_input(c.input);
  const MiniFsView view = open_view(dump, resolve_base(dump, c), view_options(c));
  ExtractOptions opts;
  opts.threads = c.threads;
  const ExtractReport report = extract_all(view, c.output, opts);
  write_extract_report(out, report, format_of(c));
  return report.failed == 0 ? kExitOk : kExitInvalid;
}

int cmd_pack(const Config& c, std::ostream& out) {
  PackOptions opts;
  opts.max_chunk_decompressed = c.max_chunk;
  opts.preserve_order = c.preserve_order;
  opts.mimic_vendor = c.mimic_vendor;
  if (!c.unknown_a.empty()) opts.unknown_a = parse_word(c.unknown_a, "--unknown-a");
  if (!c.unknown_b.empty()) opts.unknown_b = parse_word(c.unknown_b, "--unknown-b");
  opts.encode.preset = c.preset;
  opts.threads = c.threads;
  const Bytes image = pack_directory(c.input, opts);
  write_output(c.output, image);
  if (format_of(c) == OutputFormat::Machine) {
    out << "packed bytes=" << image.size() << " output=" << c.output << '\n';
  } else {
    out << "wrote " << image.size() << " bytes to " << c.output << '\n';
  }
  return kExitOk;
}

int cmd_verify(const Config& c, std::ostream& out) {
  const Bytes dump = read_input(c.input);
  ViewOptions o;
  o.force = true;
  const MiniFsView view = open_view(dump, resolve_base(dump, c), o);
  const bool machine = format_of(c) == OutputFormat::Machine;
  bool ok = view.violations().empty();
  for (const Violation& v : view.violations()) {
    if (machine) {
      out << "violation kind=" << to_string(v.kind) << " detail=" << v.detail << '\n';
    } else {
      out << "table violation: " << to_string(v.kind) << " (" << v.detail << ")\n";
    }
  }
  for (std::size_t i = 0; i < view.chunks().size(); ++i) {
    std::string config = "unknown";
    std::string status = "ok";
    try {
      const ByteView bytes = view.chunk_bytes(i);
      const FormatVersion version = check_config_word(bytes);
      config = to_string(version);
      if (version != FormatVersion::V2) {
        status = std::string(to_string(ErrorCode::UnsupportedVersion));
      } else {
        (void)decompress_chunk(bytes, view.chunks()[i].decompressed_size, view.options().decode);
      }
    } catch (const Error& e) {
      status = std::string(to_string(e.code()));
      if (e.code() == ErrorCode::UnknownConfigWord) config = "unknown";
    }
    ok = ok && status == "ok";
    if (machine) {
      out << "chunk index=" << i << " compressed=" << view.chunks()[i].compressed_size
          << " decompressed=" << view.chunks()[i].decompressed_size << " config=" << config << " status=" << status
          << '\n';
    } else {
      out << "chunk " << i << ": " << (status == "ok" ? "ok" : "FAILED") << " (config word " << config;
      if (status != "ok") out << ", " << status;
      out << ")\n";
    }
  }
  out << (machine ? "verify result=" : "verify: ") << (ok ? "pass" : "fail") << '\n';
  return ok ? kExitOk : kExitInvalid;
}

int cmd_fixture(const Config& c, std::ostream& out) {
  const Fixture f = make_fixture({c.shape, c.seed});
  write_output(c.output, f.dump);
  if (!c.manifest.empty()) {
    std::ofstream m(c.manifest, std::ios::trunc);
    write_manifest(m, f.manifest);
    m.close();
    if (!m) throw Error(ErrorCode::IoError, "cannot write " + c.manifest);
  } else {
    write_manifest(out, f.manifest);
  }
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError: return kExitIo;
    case ErrorCode::NotFound:
    case ErrorCode::AmbiguousPath: return kExitNotFound;
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnknownShape: return kExitUsage;
    default: return kExitInvalid;
  }
}

std::uint32_t default_block_size() {
  if (const char* env = std::getenv("MINIFS_BLOCK_SIZE"); env && *env) {
    try {
      return static_cast<std::uint32_t>(std::stoul(env, nullptr, 0));
    } catch (const std::exception&) {
    }
  }
  return kDefaultBlockSize;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  c.block_size = default_block_size();

  CLI::App app{"Locate, inspect, extract and rebuild MiniFS v2 file systems in flash dumps", "minifs"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "minifs 1.0");

  auto add_format = [&c](CLI::App* sub) {
    sub->add_option("--format", c.format, "Output style")->check(CLI::IsMember({"human", "machine"}));
  };
  auto add_base = [&c](CLI::App* sub) {
    sub->add_option("--base", c.base, "Offset of the MINIFS magic (default: auto-detect)");
  };

  auto* scan = app.add_subcommand("scan", "Entropy sections and MiniFS instances in a dump");
  scan->add_option("dump", c.input, "Flash dump")->required();
  scan->add_option("--block-size", c.block_size, "Entropy block size (power of two >= 16)");
  scan->add_option("--threshold", c.threshold, "High-entropy threshold, bits/byte");
  scan->add_option("--empty-byte", c.empty_byte, "Byte value of erased flash");
  auto* csv = scan->add_flag("--entropy-csv", c.entropy_csv, "Emit offset,entropy rows instead of the report");
  auto* scan_fmt = scan->add_option("--format", c.format, "Output style")->check(CLI::IsMember({"human", "machine"}));
  csv->excludes(scan_fmt);

  auto* entropy = app.add_subcommand("entropy", "Per-block entropy as offset,entropy rows");
  entropy->add_option("dump", c.input, "Flash dump")->required();
  entropy->add_option("--block-size", c.block_size, "Entropy block size (power of two >= 16)");

  auto* info = app.add_subcommand("info", "Decoded header and layout");
  info->add_option("image", c.input, "Image or dump")->required();
  add_base(info);
  add_format(info);

  auto* ls = app.add_subcommand("ls", "List files");
  ls->add_option("image", c.input, "Image or dump")->required();
  add_base(ls);
  add_format(ls);
  ls->add_flag("--force", c.force, "Proceed despite layout violations");

  auto* cat = app.add_subcommand("cat", "Write one file's bytes to standard output");
  cat->add_option("image", c.input, "Image or dump")->required();
  cat->add_option("path", c.selector, "Full path inside the file system");
  cat->add_option("--index", c.index, "Select by file-table index");
  add_base(cat);
  cat->add_flag("--force", c.force, "Proceed despite layout violations");

  auto* extract = app.add_subcommand("extract", "Extract every file into a directory");
  extract->add_option("image", c.input, "Image or dump")->required();
  extract->add_option("out_dir", c.output, "Output directory")->required();
  add_base(extract);
  add_format(extract);
  extract->add_flag("--force", c.force, "Extract what is readable despite layout violations");
  extract->add_option("--threads", c.threads, "Decompression threads (0 = all cores)");

  auto* packc = app.add_subcommand("pack", "Build an image from a directory tree");
  packc->add_option("tree", c.input, "Source directory")->required();
  packc->add_option("out_image", c.output, "Image to write")->required();
  packc->add_option("--max-chunk", c.max_chunk, "Decompressed bytes per chunk");
  auto* preserve = packc->add_flag("--preserve-order", c.preserve_order, "Keep directory-walk order");
  auto* sorted = packc->add_flag("--sorted", c.sorted, "Sort entries by full path (default)");
  preserve->excludes(sorted);
  auto* mimic = packc->add_flag("--mimic-vendor", c.mimic_vendor, "Store the first file's size in the word at 0x18");
  packc->add_option("--unknown-a", c.unknown_a, "Header word at 0x10 (hex)");
  auto* ub = packc->add_option("--unknown-b", c.unknown_b, "Header word at 0x18 (hex)");
  mimic->excludes(ub);
  packc->add_option("--preset", c.preset, "LZMA preset 0-9")->check(CLI::Range(0, 9));
  packc->add_option("--threads", c.threads, "Compression threads (0 = all cores)");
  add_format(packc);

  auto* verify = app.add_subcommand("verify", "Check tables, configuration words and every chunk");
  verify->add_option("image", c.input, "Image or dump")->required();
  add_base(verify);
  add_format(verify);

  auto* fixture = app.add_subcommand("fixture", "Write a synthetic test dump and its manifest");
  fixture->group("");
  fixture->add_option("shape", c.shape, "minimal | paper-like | multi-chunk")->required();
  fixture->add_option("out_dump", c.output, "Dump to write")->required();
  fixture->add_option("--seed", c.seed, "PRNG seed");
  fixture->add_option("--manifest", c.manifest, "Manifest file (default: standard output)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*scan) return cmd_scan(c, out);
    if (*entropy) return cmd_entropy(c, out);
    if (*info) return cmd_info(c, out);
    if (*ls) return cmd_ls(c, out);
    if (*cat) return cmd_cat(c, out);
    if (*extract) return cmd_extract(c, out);
    if (*packc) return cmd_pack(c, out);
    if (*verify) return cmd_verify(c, out);
    if (*fixture) return cmd_fixture(c, out);
  } catch (const Exit& e) {
    err << "minifs: " << e.message << '\n';
    return e.code;
  } catch (const Error& e) {
    err << "minifs: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "minifs: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace minifs::cli
