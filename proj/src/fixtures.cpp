#include "minifs/fixtures.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <sstream>

#include "minifs/error.hpp"

namespace minifs {

namespace {

constexpr std::uint32_t kFixtureBlock = 1024;

constexpr std::array<std::string_view, 24> kWords{
    "router", "wifi",   "band",    "config", "enable", "status", "admin", "lan",
    "wan",    "dhcp",   "channel", "ssid",   "mode",   "value",  "table", "page",
    "script", "style",  "default", "port",   "user",   "update", "reset", "time"};

std::string text(SplitMix64& rng, std::size_t approx_len) {
  std::string s;
  while (s.size() < approx_len) {
    s += kWords[rng.below(kWords.size())];
    s += rng.below(8) == 0 ? '\n' : ' ';
  }
  return s;
}

Bytes text_bytes(SplitMix64& rng, std::size_t approx_len) { return to_bytes(text(rng, approx_len)); }

Bytes config_text(SplitMix64& rng, std::size_t exact_len) {
  std::string s;
  while (s.size() < exact_len) {
    s += kWords[rng.below(kWords.size())];
    s += '_';
    s += kWords[rng.below(kWords.size())];
    s += '=';
    s += std::to_string(rng.below(100000));
    s += '\n';
  }
  s.resize(exact_len);
  return to_bytes(s);
}

std::uint64_t round_up(std::uint64_t v, std::uint64_t to) { return (v + to - 1) / to * to; }

// Image order and chunk assignment, computed the same way the packer
// documents it: sorted by path, first-fit against the cap.
void record_files(Manifest& m, std::vector<PackEntry>& entries, std::uint32_t cap) {
  std::sort(entries.begin(), entries.end(), [](const PackEntry& a, const PackEntry& b) { return a.path < b.path; });
  std::uint64_t fill = 0;
  std::uint32_t chunk = 0;
  bool started = false;
  for (const PackEntry& e : entries) {
    if (started && fill + e.data.size() > cap) {
      ++chunk;
      fill = 0;
    }
    started = true;
    fill += e.data.size();
    m.files.push_back({e.path, static_cast<std::uint32_t>(e.data.size()), chunk});
  }
  m.chunk_count = entries.empty() ? 0 : chunk + 1;
}

Fixture bare_image(const FixtureSpec& spec, std::vector<PackEntry> entries, std::uint32_t cap) {
  Fixture f;
  f.manifest.shape = spec.shape;
  f.manifest.seed = spec.seed;
  record_files(f.manifest, entries, cap);
  PackOptions opts;
  opts.max_chunk_decompressed = cap;
  opts.threads = 1;
  f.dump = pack(entries, opts);
  f.entries = std::move(entries);
  f.manifest.dump_length = f.dump.size();
  f.manifest.magic_offset = 0;
  f.manifest.image_length = f.dump.size();
  f.manifest.sections.push_back({0, f.dump.size(), "minifs"});
  return f;
}

Fixture minimal(const FixtureSpec& spec) {
  SplitMix64 rng(spec.seed);
  std::vector<PackEntry> entries{{"a/b.txt", text_bytes(rng, 64 + rng.below(512))}};
  return bare_image(spec, std::move(entries), kDefaultMaxChunk);
}

Fixture multi_chunk(const FixtureSpec& spec) {
  SplitMix64 rng(spec.seed);
  constexpr std::uint32_t cap = 4096;
  std::vector<PackEntry> entries;
  const std::size_t n = 6 + rng.below(6);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t size = 1000 + rng.below(2500);
    Bytes data = (i % 2 == 0) ? rng.bytes(size) : text_bytes(rng, size);
    data.resize(size);
    entries.push_back({"dir" + std::to_string(i % 3) + "/file" + std::to_string(i) + ".bin", std::move(data)});
  }
  return bare_image(spec, std::move(entries), cap);
}

// Five regions, block aligned except the image's tail:
//   low-entropy code-like blob | uniform random blob | MiniFS image |
//   0xFF erased flash | ASCII configuration text
Fixture five_region(const FixtureSpec& spec) {
  SplitMix64 rng(spec.seed);
  Fixture f;
  Manifest& m = f.manifest;
  m.shape = spec.shape;
  m.seed = spec.seed;

  Bytes& dump = f.dump;
  const std::size_t boot_len = 16 * kFixtureBlock;
  dump.reserve(256 * kFixtureBlock);
  for (std::size_t i = 0; i < boot_len; ++i) dump.push_back(static_cast<std::uint8_t>(0x40 + rng.below(16)));
  m.sections.push_back({0, dump.size(), "low"});

  const std::size_t rtos_start = dump.size();
  Bytes rtos = rng.bytes(32 * kFixtureBlock);
  dump.insert(dump.end(), rtos.begin(), rtos.end());
  m.sections.push_back({rtos_start, dump.size(), "high"});

  std::vector<PackEntry> entries{
      {"fw/mtk/base.css", text_bytes(rng, 3000)},
      {"fw/mtk/app.js", text_bytes(rng, 5000)},
      {"web/index.html", text_bytes(rng, 4000)},
      {"web/status.htm", text_bytes(rng, 2500)},
      {"web/js/util.js", text_bytes(rng, 6000)},
      {"web/img/logo.png", rng.bytes(1500)},
      {"certs/server.pem", to_bytes("-----BEGIN CERTIFICATE-----\n" + text(rng, 600) + "\n-----END CERTIFICATE-----\n")},
      {"mtk/wifi.dat", text_bytes(rng, 800)},
      {"boot.bin", rng.bytes(2048)},
  };
  entries[5].data[0] = 0x89;
  std::copy_n("PNG", 3, entries[5].data.begin() + 1);
  record_files(m, entries, kDefaultMaxChunk);
  PackOptions opts;
  opts.mimic_vendor = true;
  opts.threads = 1;
  const Bytes image = pack(entries, opts);
  f.entries = std::move(entries);

  m.magic_offset = dump.size();
  m.image_length = image.size();
  dump.insert(dump.end(), image.begin(), image.end());
  m.sections.push_back({m.magic_offset, dump.size(), "minifs"});

  const std::size_t empty_start = dump.size();
  dump.resize(round_up(dump.size(), kFixtureBlock) + 24 * kFixtureBlock, 0xFF);
  m.sections.push_back({empty_start, dump.size(), "empty"});

  const std::size_t config_start = dump.size();
  Bytes config = config_text(rng, 8 * kFixtureBlock);
  dump.insert(dump.end(), config.begin(), config.end());
  m.sections.push_back({config_start, dump.size(), "low"});

  m.dump_length = dump.size();
  return f;
}

std::string value_of(const std::string& token, std::string_view key) {
  if (token.size() <= key.size() || token.compare(0, key.size(), key) != 0 || token[key.size()] != '=') {
    throw Error(ErrorCode::InvalidArgument, "expected " + std::string(key) + "=..., got \"" + token + "\"");
  }
  return token.substr(key.size() + 1);
}

std::uint64_t number(const std::string& s) { return std::stoull(s, nullptr, 0); }

}  // namespace

void SplitMix64::fill(std::uint8_t* out, std::size_t n) {
  std::size_t i = 0;
  while (i < n) {
    std::uint64_t v = next();
    for (int k = 0; k < 8 && i < n; ++k, ++i) {
      out[i] = static_cast<std::uint8_t>(v);
      v >>= 8;
    }
  }
}

Bytes SplitMix64::bytes(std::size_t n) {
  Bytes out(n);
  fill(out.data(), n);
  return out;
}

Fixture make_fixture(const FixtureSpec& spec) {
  if (spec.shape == "minimal") return minimal(spec);
  if (spec.shape == "multi-chunk") return multi_chunk(spec);
  if (spec.shape == "paper-like") return five_region(spec);
  throw Error(ErrorCode::UnknownShape, "no fixture shape \"" + spec.shape + "\"");
}

void write_manifest(std::ostream& out, const Manifest& m) {
  out << "shape=" << m.shape << '\n'
      << "seed=" << m.seed << '\n'
      << "dump_length=" << m.dump_length << '\n'
      << "magic_offset=" << hex(m.magic_offset) << '\n'
      << "image_length=" << m.image_length << '\n'
      << "chunk_count=" << m.chunk_count << '\n';
  for (const ManifestFile& f : m.files) {
    out << "file size=" << f.size << " chunk=" << f.chunk_index << " path=" << f.path << '\n';
  }
  for (const ManifestSection& s : m.sections) {
    out << "section start=" << hex(s.start) << " end=" << hex(s.end) << " label=" << s.label << '\n';
  }
}

Manifest read_manifest(std::istream& in) {
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "file") {
      std::string size, chunk;
      ls >> size >> chunk;
      std::string rest;
      std::getline(ls >> std::ws, rest);
      m.files.push_back({value_of(rest, "path"), static_cast<std::uint32_t>(number(value_of(size, "size"))),
                         static_cast<std::uint32_t>(number(value_of(chunk, "chunk")))});
    } else if (head == "section") {
      std::string start, end, label;
      ls >> start >> end >> label;
      m.sections.push_back({number(value_of(start, "start")), number(value_of(end, "end")), value_of(label, "label")});
    } else {
      const auto eq = head.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "bad manifest line \"" + line + "\"");
      const std::string key = head.substr(0, eq);
      const std::string value = head.substr(eq + 1);
      if (key == "shape") m.shape = value;
      else if (key == "seed") m.seed = number(value);
      else if (key == "dump_length") m.dump_length = number(value);
      else if (key == "magic_offset") m.magic_offset = number(value);
      else if (key == "image_length") m.image_length = number(value);
      else if (key == "chunk_count") m.chunk_count = static_cast<std::uint32_t>(number(value));
      else throw Error(ErrorCode::InvalidArgument, "unknown manifest key \"" + key + "\"");
    }
  }
  return m;
}

}  // namespace minifs
